#include "resdens/quadrature.hpp"

#include <numbers>
#include <string>

namespace resdens {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw ConfigError("quadrature tolerances must be positive");
  }
  if (panels < 1) throw ConfigError("quadrature needs at least one panel");
}

QuadratureRule parse_quadrature_rule(std::string_view name) {
  if (name == "gauss-legendre" || name == "gauss_legendre") {
    return QuadratureRule::gauss_legendre;
  }
  if (name == "adaptive-simpson" || name == "adaptive_simpson") {
    return QuadratureRule::adaptive_simpson;
  }
  throw ConfigError("unknown quadrature rule '" + std::string(name) + "'");
}

// Roots of P_n by Newton iteration from the Chebyshev-like initial guess,
// weights from the derivative at the root.
GaussLegendre::GaussLegendre(int order) : nodes_(order), weights_(order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be positive");
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[order - 1 - i] = x;
    weights_[i] = w;
    weights_[order - 1 - i] = w;
  }
  if (order % 2 == 1) nodes_[order / 2] = 0.0;
}

const GaussLegendre& default_gauss_legendre() {
  static const GaussLegendre rule(10);
  return rule;
}

namespace {

double tensor_gl(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> lower, std::span<const double> upper,
                 int panels) {
  const auto& rule = default_gauss_legendre();
  const std::size_t dim = lower.size();
  const int per_axis = panels * rule.order();

  // Abscissae and weights of the 1-d composite rule along each axis.
  std::vector<std::vector<double>> xs(dim), ws(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double width = (upper[a] - lower[a]) / panels;
    xs[a].reserve(per_axis);
    ws[a].reserve(per_axis);
    for (int p = 0; p < panels; ++p) {
      const double mid = lower[a] + (p + 0.5) * width;
      for (int k = 0; k < rule.order(); ++k) {
        xs[a].push_back(mid + 0.5 * width * rule.nodes()[k]);
        ws[a].push_back(0.5 * width * rule.weights()[k]);
      }
    }
  }

  std::vector<int> idx(dim, 0);
  std::vector<double> point(dim);
  NeumaierSum acc;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      point[a] = xs[a][idx[a]];
      w *= ws[a][idx[a]];
    }
    acc += w * f(point);
    std::size_t a = 0;
    while (a < dim && ++idx[a] == per_axis) {
      idx[a] = 0;
      ++a;
    }
    if (a == dim) break;
  }
  return acc.value();
}

}  // namespace

double integrate_box(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> lower, std::span<const double> upper,
                     const QuadratureSpec& spec) {
  spec.validate();
  if (lower.size() != upper.size() || lower.empty() || lower.size() > 4) {
    throw DimensionError("integrate_box supports boxes of dimension 1 to 4");
  }
  const std::size_t dim = lower.size();
  // Keep the tensor grid below ~4e6 evaluations.
  const double budget = 4e6;
  int panels = spec.panels;
  double prev = tensor_gl(f, lower, upper, panels);
  double dev = 0.0;
  while (true) {
    const int next_panels = panels * 2;
    const double evals = std::pow(static_cast<double>(next_panels) *
                                      default_gauss_legendre().order(),
                                  static_cast<double>(dim));
    if (evals > budget) break;
    panels = next_panels;
    const double next = tensor_gl(f, lower, upper, panels);
    dev = std::abs(next - prev);
    prev = next;
    if (detail::converged(dev, next, spec)) return next;
  }
  throw QuadratureError("tensor Gauss-Legendre refinement did not converge", dev);
}

}  // namespace resdens
