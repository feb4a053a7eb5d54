#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "resdens/dataset.hpp"
#include "resdens/kernel.hpp"

namespace resdens {

/// Covariate density on R^d, used by quadrature-based expectations.
using DensityFnD = std::function<double(std::span<const double>)>;

/// Uniform cell grid over the covariates with cell width slightly above b/2,
/// so every point within sup-distance b/2 of a query lies in the 3^d block of
/// cells around it.
class NeighborGrid {
 public:
  NeighborGrid(const Dataset& data, double b);

  /// Calls visit(j) for every observation in the cells adjacent to x
  /// (including x's own cell). Order is unspecified.
  template <class Visit>
  void for_each_candidate(std::span<const double> x, Visit&& visit) const;

 private:
  std::vector<std::int64_t> cell_of(std::span<const double> x) const;
  std::size_t find_cell(std::span<const std::int64_t> key) const;

  std::size_t dim_;
  double width_;
  // Cells sorted lexicographically by key; points of cell c are
  // order_[start_[c] .. start_[c+1]).
  std::vector<std::int64_t> keys_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> order_;
};

/// Compressed rows of nonzero kernel weights K0((X_j - X_i)/b0), j != i,
/// with column indices ascending within each row.
struct NeighborTable {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> index;
  std::vector<double> weight;

  std::size_t rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {index.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::span<const double> weights(std::size_t i) const {
    return {weight.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

/// Grid-accelerated, OpenMP-parallel construction of the neighbour table.
NeighborTable build_neighbor_table(const Dataset& data, const ProductKernel& k0,
                                   double b0);

/// Leave-one-out Nadaraya-Watson machinery on a fixed design.
///
/// All sums run over neighbours in ascending index order with compensated
/// accumulation, so results are bit-identical to the brute-force loops in
/// reference.hpp.
class LeaveOneOutSmoother {
 public:
  LeaveOneOutSmoother(const Dataset& data, ProductKernel k0, double b0);

  const Dataset& data() const { return data_; }
  const ProductKernel& kernel() const { return k0_; }
  double b0() const { return b0_; }
  const NeighborTable& table() const { return table_; }
  /// n * b0^d, the normalising factor of the density-type averages.
  double scale() const { return scale_; }

  /// Sum of the kernel weights around X_i (excluding i).
  double weight_sum(std::size_t i) const;
  /// g_hat_in = weight_sum(i) / (n b0^d); divisor n although n - 1 terms.
  double g_hat(std::size_t i) const { return weight_sum(i) / scale_; }
  /// Weighted average of `values` over the neighbours of i; empty when the
  /// neighbourhood carries no mass.
  std::optional<double> smooth(std::size_t i, std::span<const double> values) const;
  std::optional<double> m_hat(std::size_t i) const { return smooth(i, data_.y()); }

  /// All m_hat_in for the responses `values`, in parallel. Undefined entries
  /// get defined[i] = 0 and value 0.
  void smooth_all(std::span<const double> values, std::span<double> out,
                  std::span<std::uint8_t> defined) const;

 private:
  const Dataset& data_;
  ProductKernel k0_;
  double b0_;
  double scale_;
  NeighborTable table_;
};

/// Per-observation output of the first stage.
struct ResidualFit {
  std::vector<double> m_hat;     ///< m_hat_in; 0 where undefined
  std::vector<double> g_hat;     ///< g_hat_in
  std::vector<double> residual;  ///< Y_i - m_hat_in; 0 where undefined
  std::vector<std::uint8_t> defined;  ///< g_hat_in > 0
  std::vector<std::uint8_t> kept;     ///< X_i in X0 and defined
  double b0 = 0.0;

  std::size_t size() const { return m_hat.size(); }
  std::size_t n_kept() const;
  std::size_t n_undefined() const;
  std::optional<double> m_hat_at(std::size_t i) const {
    return defined[i] ? std::optional<double>(m_hat[i]) : std::nullopt;
  }
  /// Residuals of the kept observations, in index order.
  std::vector<double> kept_residuals() const;
};

void check_bandwidth(double b, const char* name);

/// g_hat_n(x) = (1/(n b0^d)) sum_i K0((X_i - x)/b0).
double g_hat_n(const Dataset& data, const ProductKernel& k0, double b0,
               std::span<const double> x);
/// Same, using a prebuilt grid for the same data and b0.
double g_hat_n(const Dataset& data, const NeighborGrid& grid,
               const ProductKernel& k0, double b0, std::span<const double> x);

/// E[g_hat_n(x)] = integral of K0(z) g(x + b0 z) dz by quadrature.
double g_bar_n(const DensityFnD& g, const ProductKernel& k0, double b0,
               std::span<const double> x, const QuadratureSpec& quad);

double leave_one_out_g(const Dataset& data, const ProductKernel& k0, double b0,
                       std::size_t i);

/// Leave-one-out Nadaraya-Watson value at X_i, or nullopt when the
/// neighbourhood of X_i carries no kernel mass.
std::optional<double> nw_leave_one_out(const Dataset& data, const ProductKernel& k0,
                                       double b0, std::size_t i);

/// Computes m_hat_in, g_hat_in, the residuals and the keep indicators.
/// Throws AllTrimmed when no observation is kept.
ResidualFit fit_residuals(const Dataset& data, const ProductKernel& k0, double b0,
                          const TrimRegion& trim);
ResidualFit fit_residuals(const LeaveOneOutSmoother& smoother, const TrimRegion& trim);

/// D_i = { k != i : K0((X_k - X_i)/b0) != 0 }, ascending.
std::vector<std::size_t> dependency_set(const Dataset& data, const ProductKernel& k0,
                                        double b0, std::size_t i);

// ---------------------------------------------------------------------------

template <class Visit>
void NeighborGrid::for_each_candidate(std::span<const double> x, Visit&& visit) const {
  const auto center = cell_of(x);
  std::vector<std::int64_t> key(center);
  std::vector<int> offset(dim_, -1);
  while (true) {
    for (std::size_t a = 0; a < dim_; ++a) key[a] = center[a] + offset[a];
    const std::size_t c = find_cell(key);
    if (c != static_cast<std::size_t>(-1)) {
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) visit(order_[k]);
    }
    std::size_t a = 0;
    while (a < dim_ && ++offset[a] == 2) {
      offset[a] = -1;
      ++a;
    }
    if (a == dim_) break;
  }
}

}  // namespace resdens
