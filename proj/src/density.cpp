#include "resdens/density.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "resdens/error.hpp"
#include "resdens/summation.hpp"

namespace resdens {

double DensityCurve::trapezoid_mass() const {
  NeumaierSum acc;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    acc += 0.5 * (grid[k] - grid[k - 1]) * (values[k] + values[k - 1]);
  }
  return acc.value();
}

std::vector<double> default_grid(std::span<const double> residuals, double b1,
                                 double support_radius, std::size_t points) {
  check_bandwidth(b1, "b1");
  if (residuals.empty()) throw AllTrimmed();
  if (points < 2) throw GridError("a grid needs at least two points");
  const auto [lo_it, hi_it] = std::minmax_element(residuals.begin(), residuals.end());
  const double lo = *lo_it - b1 * support_radius;
  const double hi = *hi_it + b1 * support_radius;
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = lo + step * static_cast<double>(k);
  grid.back() = hi;
  return grid;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw GridError("evaluation grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw GridError("grid must be strictly increasing");
  }
}

// Parallel over grid points; each point sums the centres in index order.
DensityCurve kde(std::span<const double> centers, const UnivariateKernel& k1,
                 double b1, std::span<const double> grid) {
  DensityCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.assign(grid.size(), 0.0);
  curve.b1 = b1;
  curve.n_kept = centers.size();
  curve.kernel_name = k1.name();
  const double norm = 1.0 / (b1 * static_cast<double>(centers.size()));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(grid.size()); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const double e = grid[k];
    NeumaierSum acc;
    for (double c : centers) acc += k1.value((c - e) / b1);
    curve.values[k] = norm * acc.value();
  }
  return curve;
}

}  // namespace

DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1,
                  std::span<const double> grid) {
  check_bandwidth(b1, "b1");
  const auto kept = fit.kept_residuals();
  if (kept.empty()) throw AllTrimmed();
  check_grid(grid);
  return kde(kept, k1, b1, grid);
}

DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1) {
  check_bandwidth(b1, "b1");
  const auto kept = fit.kept_residuals();
  if (kept.empty()) throw AllTrimmed();
  const auto grid = default_grid(kept, b1, k1.support_radius());
  return kde(kept, k1, b1, grid);
}

DensityCurve oracle_kde(std::span<const double> errors, const UnivariateKernel& k1,
                        double b1, std::span<const double> grid) {
  check_bandwidth(b1, "b1");
  if (errors.empty()) throw DataError("oracle KDE needs at least one error");
  check_grid(grid);
  return kde(errors, k1, b1, grid);
}

double mise(const DensityCurve& curve, const DensityFn& f_true) {
  if (curve.grid.size() < 16) {
    throw GridError("MISE needs a grid of at least 16 points");
  }
  NeumaierSum acc;
  double prev = curve.values[0] - f_true(curve.grid[0]);
  for (std::size_t k = 1; k < curve.grid.size(); ++k) {
    const double cur = curve.values[k] - f_true(curve.grid[k]);
    acc += 0.5 * (curve.grid[k] - curve.grid[k - 1]) * (cur * cur + prev * prev);
    prev = cur;
  }
  return acc.value();
}

void write_density_csv(std::ostream& out, const DensityCurve& curve) {
  out << std::setprecision(17);
  out << "# b1=" << curve.b1 << '\n';
  out << "# n_kept=" << curve.n_kept << '\n';
  out << "# kernel=" << curve.kernel_name << '\n';
  out << "e,fhat\n";
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    out << curve.grid[k] << ',' << curve.values[k] << '\n';
  }
}

}  // namespace resdens
