#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "resdens/error.hpp"
#include "resdens/summation.hpp"

namespace resdens {

enum class QuadratureRule { gauss_legendre, adaptive_simpson };

/// How an integral is to be computed and when it counts as converged.
///
/// For `gauss_legendre` the interval is split into `panels` equal panels
/// with a fixed-order Gauss-Legendre rule on each; the panel count is doubled
/// until two successive results agree to max(abs_tol, rel_tol * |value|).
/// For `adaptive_simpson` `panels` seeds the initial subdivision.
struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::gauss_legendre;
  int panels = 4;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;

  void validate() const;
};

QuadratureRule parse_quadrature_rule(std::string_view name);

/// Gauss-Legendre nodes and weights on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Fixed rule on [a, b].
  template <class F>
  double apply(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    NeumaierSum acc;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      acc += weights_[k] * f(mid + half * nodes_[k]);
    }
    return half * acc.value();
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared 10-point rule used by the composite integrators.
const GaussLegendre& default_gauss_legendre();

namespace detail {

inline constexpr int kMaxPanelDoublings = 14;
inline constexpr int kMaxSimpsonDepth = 48;

inline bool converged(double deviation, double value, const QuadratureSpec& spec) {
  return deviation <= spec.abs_tol || deviation <= spec.rel_tol * std::abs(value);
}

template <class F>
double composite_gl(F& f, double a, double b, int panels) {
  const auto& rule = default_gauss_legendre();
  const double width = (b - a) / panels;
  NeumaierSum acc;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    acc += rule.apply(f, lo, hi);
  }
  return acc.value();
}

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, double& worst) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth >= kMaxSimpsonDepth) {
    worst = std::max(worst, std::abs(diff));
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, worst) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, worst);
}

}  // namespace detail

/// Integral of f over [a, b]. Points in `breakpoints` that fall inside (a, b)
/// split the interval so that kinks of a piecewise-smooth integrand land on
/// panel edges. Throws QuadratureError when the tolerance is not reached.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                 std::span<const double> breakpoints = {}) {
  spec.validate();
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, spec, breakpoints);

  std::vector<double> edges{a};
  for (double p : breakpoints) {
    if (p > a && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  std::sort(edges.begin() + 1, edges.end() - 1);

  NeumaierSum total;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double hi = edges[s + 1];
    if (lo == hi) continue;
    if (spec.rule == QuadratureRule::gauss_legendre) {
      int panels = spec.panels;
      double prev = detail::composite_gl(f, lo, hi, panels);
      double dev = 0.0;
      bool ok = false;
      for (int k = 0; k < detail::kMaxPanelDoublings; ++k) {
        panels *= 2;
        const double next = detail::composite_gl(f, lo, hi, panels);
        dev = std::abs(next - prev);
        prev = next;
        if (detail::converged(dev, next, spec)) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        throw QuadratureError("Gauss-Legendre panel refinement did not converge",
                              dev);
      }
      total += prev;
    } else {
      const int pieces = spec.panels;
      const double width = (hi - lo) / pieces;
      for (int p = 0; p < pieces; ++p) {
        const double x0 = lo + p * width;
        const double x1 = (p + 1 == pieces) ? hi : x0 + width;
        const double f0 = f(x0);
        const double f1 = f(x1);
        const double fm = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        const double tol =
            std::max(spec.abs_tol, spec.rel_tol * std::abs(whole)) / pieces;
        double worst = 0.0;
        total += detail::simpson_step(f, x0, x1, f0, fm, f1, whole, tol, 0, worst);
        if (worst > 0.0) {
          throw QuadratureError("adaptive Simpson hit the recursion limit", worst);
        }
      }
    }
  }
  return total.value();
}

/// Integral of f over the box [lower, upper] (dimension 1 to 4) by a
/// tensor-product composite Gauss-Legendre rule with panel doubling. `f`
/// receives a span of the current point.
double integrate_box(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> lower, std::span<const double> upper,
                     const QuadratureSpec& spec);

}  // namespace resdens
