#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace resdens {

/// Regression sample (X_i, Y_i), i = 1..n, X_i in R^d, stored row-major.
/// Simulated data additionally carry m(X_i) and the true errors.
class Dataset {
 public:
  /// Validates the invariants: n >= 2, finite entries, consistent lengths,
  /// and Y = m + eps when both truths are present. Throws DataError.
  Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y,
          std::optional<std::vector<double>> true_m = std::nullopt,
          std::optional<std::vector<double>> true_eps = std::nullopt);

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> x(std::size_t i) const {
    return {x_.data() + i * dim_, dim_};
  }
  std::span<const double> x_flat() const { return x_; }
  std::span<const double> y() const { return y_; }
  double y(std::size_t i) const { return y_[i]; }

  bool has_truth() const { return true_m_.has_value() && true_eps_.has_value(); }
  /// Throws DataError when the data are not simulated.
  std::span<const double> true_m() const;
  std::span<const double> true_eps() const;

  /// Same covariates, new errors: Y = m + eps. Requires true_m.
  Dataset with_errors(std::vector<double> eps) const;
  /// Same covariates, responses replaced (truths dropped).
  Dataset with_responses(std::vector<double> y) const;

 private:
  std::size_t dim_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::optional<std::vector<double>> true_m_;
  std::optional<std::vector<double>> true_eps_;
};

/// Axis-aligned box lower <= x <= upper standing in for the inner set X0.
class TrimRegion {
 public:
  TrimRegion(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  bool contains(std::span<const double> x) const;

  /// The closure of the box must sit strictly inside the covariate support.
  bool strictly_inside(std::span<const double> support_lo,
                       std::span<const double> support_hi) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// CSV with header x1..xd, y and optional m_true, eps_true columns.
/// Throws DataError carrying the offending line number.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace resdens
