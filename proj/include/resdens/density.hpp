#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "resdens/kernel.hpp"
#include "resdens/smoother.hpp"

namespace resdens {

/// A density estimate tabulated on a strictly increasing grid.
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double b1 = 0.0;
  std::size_t n_kept = 0;
  std::string kernel_name;

  /// Trapezoid integral of the tabulated values.
  double trapezoid_mass() const;
};

/// `points` equispaced values spanning [min - b1 R, max + b1 R].
std::vector<double> default_grid(std::span<const double> residuals, double b1,
                                 double support_radius, std::size_t points = 512);

/// f_hat_n(e) = sum_i 1(kept_i) K1((eps_hat_i - e)/b1) / (b1 sum_i 1(kept_i)).
/// Throws AllTrimmed when nothing is kept and InvalidBandwidth for b1 <= 0.
DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1,
                  std::span<const double> grid);
/// As above on default_grid(kept residuals, b1, R).
DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1);

/// Plain kernel density estimate of `errors` (no trimming); the benchmark
/// the two-stage estimator is compared against.
DensityCurve oracle_kde(std::span<const double> errors, const UnivariateKernel& k1,
                        double b1, std::span<const double> grid);

/// Trapezoid approximation of the integral of (f_hat - f)^2 over the curve's
/// grid. Throws GridError for grids with fewer than 16 points.
double mise(const DensityCurve& curve, const DensityFn& f_true);

/// CSV "e,fhat" with '#'-prefixed metadata lines, 17 significant digits.
void write_density_csv(std::ostream& out, const DensityCurve& curve);

}  // namespace resdens
