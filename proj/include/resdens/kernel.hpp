#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resdens/quadrature.hpp"

namespace resdens {

/// Symmetric polynomial kernel c * (1 - u^2)^p on [-1, 1], with closed-form
/// derivatives up to order 3.
///
/// `quadweight` (p = 4, c = 315/256) is three times continuously
/// differentiable on the whole real line. `triweight` (p = 3, c = 35/32) is
/// provided as a counterexample: its third derivative jumps by -48c at the
/// support boundary.
class UnivariateKernel {
 public:
  static UnivariateKernel quadweight();
  static UnivariateKernel triweight();
  /// Throws UnknownKernel for anything other than the two names above.
  static UnivariateKernel by_name(std::string_view name);

  const std::string& name() const { return name_; }
  double support_radius() const { return 1.0; }
  int power() const { return power_; }
  double normalization() const { return constant_; }

  /// K^{(order)}(v); exactly zero for |v| >= 1. Throws InvalidOrder unless
  /// order is in 0..3.
  double eval(int order, double v) const;

  double value(double v) const {
    if (!(std::abs(v) < 1.0)) return 0.0;
    return constant_ * ipow(1.0 - v * v, power_);
  }

  /// Breakpoints of the piecewise-polynomial derivatives (the support ends).
  std::span<const double> breakpoints() const { return edges_; }

 private:
  UnivariateKernel(std::string name, int power, double constant)
      : name_(std::move(name)), power_(power), constant_(constant) {}

  static double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }

  std::string name_;
  int power_;
  double constant_;
  std::vector<double> edges_{-1.0, 1.0};
};

/// d-variate product kernel K0(z) = prod_j s * K(s z_j) with s = 2R, so the
/// support is contained in [-1/2, 1/2]^d and the mass is one.
class ProductKernel {
 public:
  ProductKernel(UnivariateKernel base, int dim);

  int dim() const { return dim_; }
  const UnivariateKernel& base() const { return base_; }

  /// Throws DimensionError if z.size() != dim().
  double eval(std::span<const double> z) const;

  /// Factor for a single coordinate; eval(z) is the product of these.
  double factor(double zj) const {
    const double s = 2.0 * base_.support_radius();
    return s * base_.value(s * zj);
  }

  /// Value at (x_j - x_i) / b, without allocating or checking sizes.
  double eval_scaled_difference(std::span<const double> xj,
                                std::span<const double> xi, double b) const {
    double w = 1.0;
    for (std::size_t k = 0; k < xj.size(); ++k) {
      w *= factor((xj[k] - xi[k]) / b);
      if (w == 0.0) return 0.0;
    }
    return w;
  }

 private:
  UnivariateKernel base_;
  int dim_;
};

struct MomentCheck {
  std::string id;
  std::string description;
  double target = 0.0;
  double computed = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct MomentReport {
  std::vector<MomentCheck> checks;

  bool all_pass() const;
  std::vector<const MomentCheck*> failures() const;
  std::string to_text() const;
};

/// Largest jump |f(v + step) - f(v)| of K^{(order)} over a uniform grid
/// covering the support plus a margin.
double max_grid_jump(const UnivariateKernel& kernel, int order, double step);

/// Parameters of the continuity scan: a jump larger than lipschitz * step
/// between neighbouring grid points counts as a discontinuity.
struct ContinuityScan {
  double step = 1e-5;
  double lipschitz = 1e3;
};

/// Certifies the integral conditions required of K0 and K1 (unit mass, zero
/// first moment of K0, vanishing integrals of K1 derivatives and their first
/// moments), symmetry, support, and continuity of K1 through order 3.
MomentReport validate_kernel_conditions(const ProductKernel& k0,
                                        const UnivariateKernel& k1,
                                        const QuadratureSpec& quad,
                                        ContinuityScan scan = {});

using DensityFn = std::function<double(double)>;

/// h_p(e) = e^p f(e). Integer p uses exact powers; non-integer p uses |e|^p.
double h_p(const DensityFn& f, double p, double e);

/// Integral over eps of K^{(order)}((eps - e)/b1)^{1 or 2} * h_p(eps),
/// computed on e + b1 * support. Throws InvalidBandwidth for b1 <= 0.
double lemma4_integral(const UnivariateKernel& kernel, int order, bool squared,
                       double p, const DensityFn& f, double e, double b1,
                       const QuadratureSpec& quad);

}  // namespace resdens
