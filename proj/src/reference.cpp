#include "resdens/reference.hpp"

#include <cmath>

#include "resdens/error.hpp"
#include "resdens/summation.hpp"

namespace resdens::reference {

ResidualFit fit_residuals(const Dataset& data, const ProductKernel& k0, double b0,
                          const TrimRegion& trim) {
  check_bandwidth(b0, "b0");
  const std::size_t n = data.size();
  const double scale =
      static_cast<double>(n) * std::pow(b0, static_cast<double>(data.dim()));
  ResidualFit fit;
  fit.b0 = b0;
  fit.m_hat.assign(n, 0.0);
  fit.g_hat.assign(n, 0.0);
  fit.residual.assign(n, 0.0);
  fit.defined.assign(n, 0);
  fit.kept.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    NeumaierSum num;
    NeumaierSum den;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = k0.eval_scaled_difference(data.x(j), data.x(i), b0);
      num += data.y(j) * w;
      den += w;
    }
    fit.g_hat[i] = den.value() / scale;
    if (den.value() > 0.0) {
      fit.m_hat[i] = num.value() / den.value();
      fit.residual[i] = data.y(i) - fit.m_hat[i];
      fit.defined[i] = 1;
      fit.kept[i] = trim.contains(data.x(i)) ? 1 : 0;
    }
  }
  if (fit.n_kept() == 0) throw AllTrimmed();
  return fit;
}

DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1,
                  std::span<const double> grid) {
  check_bandwidth(b1, "b1");
  const std::size_t kept = fit.n_kept();
  if (kept == 0) throw AllTrimmed();
  DensityCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.b1 = b1;
  curve.n_kept = kept;
  curve.kernel_name = k1.name();
  const double norm = 1.0 / (b1 * static_cast<double>(kept));
  for (double e : grid) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < fit.size(); ++i) {
      if (fit.kept[i]) acc += k1.value((fit.residual[i] - e) / b1);
    }
    curve.values.push_back(norm * acc.value());
  }
  return curve;
}

std::vector<double> weight_matrix(const Dataset& data, const ProductKernel& k0,
                                  double b0) {
  const std::size_t n = data.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) w[i * n + j] = k0.eval_scaled_difference(data.x(j), data.x(i), b0);
    }
  }
  return w;
}

}  // namespace resdens::reference
