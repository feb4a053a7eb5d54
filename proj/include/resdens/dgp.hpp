#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resdens/dataset.hpp"
#include "resdens/rng.hpp"

namespace resdens {

enum class RegressionFn { constant, affine, quadratic, sinusoid };
enum class CovariateLaw { uniform, truncated_normal };
/// `zero` is the degenerate law eps = 0, useful for exactness checks.
enum class ErrorLaw { normal, laplace, beta, zero };
enum class DesignKind { random, equispaced };

/// Data-generating process Y = m(X) + eps with X ~ g on a box and eps ~ f.
/// Every error law is centred with variance sigma^2 (except `zero`).
struct DGPSpec {
  int dim = 1;

  RegressionFn m = RegressionFn::quadratic;
  double m_intercept = 1.0;  ///< value of `constant`, intercept of `affine`
  double m_slope = 1.0;      ///< common slope of `affine`

  CovariateLaw g = CovariateLaw::uniform;
  std::vector<double> support_lo{0.0};
  std::vector<double> support_hi{1.0};
  double g_mean = 0.5;  ///< truncated normal centre, every coordinate
  double g_sd = 0.25;

  ErrorLaw f = ErrorLaw::normal;
  double sigma = 0.5;

  std::vector<double> trim_lo{0.1};
  std::vector<double> trim_hi{0.9};

  /// d = 1, U[0,1] covariates, m(x) = x^2, N(0, 0.5^2) errors, X0 = [0.1, 0.9].
  static DGPSpec default_acceptance();

  /// Throws ConfigError on inconsistent dimensions or parameters.
  void validate() const;

  double regression(std::span<const double> x) const;
  double covariate_density(std::span<const double> x) const;
  double error_density(double e) const;
  double error_variance() const;
  /// Whether f has the bounded second derivatives the error-density theory
  /// needs (the Laplace law does not).
  bool smooth_error_density() const;

  TrimRegion trim_region() const { return TrimRegion(trim_lo, trim_hi); }

  std::vector<double> draw_covariates(std::size_t n, CounterRng& rng) const;
  std::vector<double> draw_errors(std::size_t n, CounterRng& rng) const;
};

RegressionFn parse_regression_fn(std::string_view name);
CovariateLaw parse_covariate_law(std::string_view name);
ErrorLaw parse_error_law(std::string_view name);
DesignKind parse_design(std::string_view name);
std::string to_string(RegressionFn v);
std::string to_string(CovariateLaw v);
std::string to_string(ErrorLaw v);
std::string to_string(DesignKind v);

/// n observations: X from the (seed, replication, covariates) stream, eps
/// from the (seed, replication, errors) stream, Y = m(X) + eps. The stored
/// eps is Y - m so the identity holds bit-exactly.
Dataset generate_sample(const DGPSpec& dgp, std::size_t n, std::uint64_t seed,
                        std::uint64_t replication = 0);

/// Covariates only, either random from g or an equispaced midpoint lattice
/// over the support (n must then be a perfect d-th power).
std::vector<double> make_design(const DGPSpec& dgp, std::size_t n, DesignKind kind,
                                std::uint64_t seed);

/// Sample with the given covariates held fixed and errors from the
/// (seed, replication, errors) stream.
Dataset sample_given_design(const DGPSpec& dgp, std::span<const double> x,
                            std::uint64_t seed, std::uint64_t replication);

/// Fresh error vector of length n for one replication.
std::vector<double> draw_errors(const DGPSpec& dgp, std::size_t n, std::uint64_t seed,
                                std::uint64_t replication);

}  // namespace resdens
