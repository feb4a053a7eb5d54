#include "resdens/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <iomanip>
#include <random>

#include "resdens/error.hpp"

namespace resdens {

UnivariateKernel UnivariateKernel::quadweight() {
  return UnivariateKernel("quadweight", 4, 315.0 / 256.0);
}

UnivariateKernel UnivariateKernel::triweight() {
  return UnivariateKernel("triweight", 3, 35.0 / 32.0);
}

UnivariateKernel UnivariateKernel::by_name(std::string_view name) {
  if (name == "quadweight") return quadweight();
  if (name == "triweight") return triweight();
  throw UnknownKernel("unknown kernel '" + std::string(name) + "'");
}

// With w = 1 - u^2 and K = c w^p:
//   K'   = -2p c u w^{p-1}
//   K''  = c [-2p w^{p-1} + 4p(p-1) u^2 w^{p-2}]
//   K''' = c [12p(p-1) u w^{p-2} - 8p(p-1)(p-2) u^3 w^{p-3}]
double UnivariateKernel::eval(int order, double v) const {
  if (order < 0 || order > 3) {
    throw InvalidOrder("kernel derivative order must be in 0..3, got " +
                       std::to_string(order));
  }
  if (!(std::abs(v) < 1.0)) return 0.0;
  const double p = power_;
  const double w = 1.0 - v * v;
  switch (order) {
    case 0:
      return constant_ * ipow(w, power_);
    case 1:
      return -2.0 * p * constant_ * v * ipow(w, power_ - 1);
    case 2:
      return constant_ * (-2.0 * p * ipow(w, power_ - 1) +
                          4.0 * p * (p - 1.0) * v * v * ipow(w, power_ - 2));
    default:
      return constant_ * (12.0 * p * (p - 1.0) * v * ipow(w, power_ - 2) -
                          8.0 * p * (p - 1.0) * (p - 2.0) * v * v * v *
                              ipow(w, power_ - 3));
  }
}

ProductKernel::ProductKernel(UnivariateKernel base, int dim)
    : base_(std::move(base)), dim_(dim) {
  if (dim < 1) throw DimensionError("product kernel dimension must be >= 1");
}

double ProductKernel::eval(std::span<const double> z) const {
  if (z.size() != static_cast<std::size_t>(dim_)) {
    throw DimensionError("K0 expects a " + std::to_string(dim_) +
                         "-vector, got length " + std::to_string(z.size()));
  }
  double w = 1.0;
  for (double zj : z) w *= factor(zj);
  return w;
}

bool MomentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const MomentCheck& c) { return c.pass; });
}

std::vector<const MomentCheck*> MomentReport::failures() const {
  std::vector<const MomentCheck*> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(&c);
  }
  return out;
}

std::string MomentReport::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(24) << "condition" << std::right << std::setw(14)
     << "target" << std::setw(14) << "computed" << std::setw(14) << "deviation"
     << std::setw(12) << "tolerance"
     << "  result\n";
  os << std::setprecision(6);
  for (const auto& c : checks) {
    os << std::left << std::setw(24) << c.id << std::right << std::setw(14)
       << c.target << std::setw(14) << c.computed << std::setw(14) << c.deviation
       << std::setw(12) << c.tolerance << "  " << (c.pass ? "pass" : "FAIL")
       << "  " << c.description << '\n';
  }
  return os.str();
}

double max_grid_jump(const UnivariateKernel& kernel, int order, double step) {
  const double lo = -kernel.support_radius() - 0.1;
  const double hi = kernel.support_radius() + 0.1;
  const auto count = static_cast<long>(std::ceil((hi - lo) / step));
  double worst = 0.0;
  double prev = kernel.eval(order, lo);
  for (long k = 1; k <= count; ++k) {
    const double cur = kernel.eval(order, lo + k * step);
    worst = std::max(worst, std::abs(cur - prev));
    prev = cur;
  }
  return worst;
}

namespace {

MomentCheck make_check(std::string id, std::string description, double target,
                       double computed, double tolerance) {
  MomentCheck c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.target = target;
  c.computed = computed;
  c.deviation = std::abs(computed - target);
  c.tolerance = tolerance;
  c.pass = c.deviation <= tolerance;
  return c;
}

}  // namespace

MomentReport validate_kernel_conditions(const ProductKernel& k0,
                                        const UnivariateKernel& k1,
                                        const QuadratureSpec& quad,
                                        ContinuityScan scan) {
  quad.validate();
  MomentReport report;
  const double tol = quad.abs_tol;
  const auto d = static_cast<std::size_t>(k0.dim());

  // K0 on its box.
  const std::vector<double> lower(d, -0.5), upper(d, 0.5);
  const double mass0 = integrate_box(
      [&](std::span<const double> z) { return k0.eval(z); }, lower, upper, quad);
  report.checks.push_back(make_check("K0.mass", "integral of K0 equals 1", 1.0,
                                     mass0, tol));
  for (std::size_t j = 0; j < d; ++j) {
    const double m1 = integrate_box(
        [&](std::span<const double> z) { return z[j] * k0.eval(z); }, lower,
        upper, quad);
    report.checks.push_back(make_check("K0.first_moment[" + std::to_string(j) + "]",
                                       "integral of z_j K0(z) equals 0", 0.0, m1,
                                       tol));
  }
  {
    // Deterministic probe points; one coordinate pushed past the box edge
    // for the support check.
    std::mt19937_64 gen(20120301);
    std::uniform_real_distribution<double> inside(-0.6, 0.6);
    std::uniform_real_distribution<double> beyond(0.5, 0.7);
    double asym = 0.0;
    double outside = 0.0;
    std::vector<double> z(d), mz(d);
    for (int s = 0; s < 256; ++s) {
      for (std::size_t j = 0; j < d; ++j) {
        z[j] = inside(gen);
        mz[j] = -z[j];
      }
      asym = std::max(asym, std::abs(k0.eval(z) - k0.eval(mz)));
      z[s % d] = (s % 2 == 0 ? 1.0 : -1.0) * beyond(gen);
      outside = std::max(outside, std::abs(k0.eval(z)));
    }
    report.checks.push_back(
        make_check("K0.symmetry", "K0(z) = K0(-z)", 0.0, asym, tol));
    report.checks.push_back(make_check(
        "K0.support", "K0 vanishes outside [-1/2,1/2]^d", 0.0, outside, 0.0));
  }

  // K1 derivatives over the support.
  const double r = k1.support_radius();
  auto k1_integral = [&](auto&& g) {
    return integrate(g, -r, r, quad, k1.breakpoints());
  };
  report.checks.push_back(make_check(
      "K1.mass", "integral of K1 equals 1", 1.0,
      k1_integral([&](double v) { return k1.eval(0, v); }), tol));
  for (int l = 1; l <= 3; ++l) {
    report.checks.push_back(make_check(
        "K1.d" + std::to_string(l) + ".integral",
        "integral of K1^(" + std::to_string(l) + ") equals 0", 0.0,
        k1_integral([&](double v) { return k1.eval(l, v); }), tol));
  }
  for (int l = 2; l <= 3; ++l) {
    report.checks.push_back(make_check(
        "K1.d" + std::to_string(l) + ".first_moment",
        "integral of v K1^(" + std::to_string(l) + ")(v) equals 0", 0.0,
        k1_integral([&](double v) { return v * k1.eval(l, v); }), tol));
  }
  {
    double asym = 0.0;
    double outside = 0.0;
    for (int s = 0; s <= 400; ++s) {
      const double v = -1.2 + 2.4 * s / 400.0;
      asym = std::max(asym, std::abs(k1.eval(0, v) - k1.eval(0, -v)));
      if (std::abs(v) >= r) {
        for (int l = 0; l <= 3; ++l) outside = std::max(outside, std::abs(k1.eval(l, v)));
      }
    }
    report.checks.push_back(
        make_check("K1.symmetry", "K1(v) = K1(-v)", 0.0, asym, tol));
    report.checks.push_back(make_check("K1.support",
                                       "K1 and its derivatives vanish off the support",
                                       0.0, outside, 0.0));
  }
  for (int l = 0; l <= 3; ++l) {
    const double jump = max_grid_jump(k1, l, scan.step);
    report.checks.push_back(make_check(
        "K1.d" + std::to_string(l) + ".continuity",
        "no jump in K1^(" + std::to_string(l) + ") beyond the Lipschitz budget",
        0.0, jump, scan.lipschitz * scan.step));
  }
  return report;
}

double h_p(const DensityFn& f, double p, double e) {
  double power;
  if (p == 0.0) {
    power = 1.0;
  } else if (p == std::floor(p)) {
    power = std::pow(e, p);
  } else {
    power = std::pow(std::abs(e), p);
  }
  return power * f(e);
}

double lemma4_integral(const UnivariateKernel& kernel, int order, bool squared,
                       double p, const DensityFn& f, double e, double b1,
                       const QuadratureSpec& quad) {
  if (!(b1 > 0.0)) throw InvalidBandwidth("b1 must be positive");
  if (order < 1 || order > 3) {
    throw InvalidOrder("moment bounds are defined for derivative orders 1..3");
  }
  // Substituting eps = e + b1 v maps the support onto [-R, R].
  const double r = kernel.support_radius();
  auto integrand = [&](double v) {
    const double k = kernel.eval(order, v);
    const double kk = squared ? k * k : k;
    return kk * h_p(f, p, e + b1 * v);
  };
  return b1 * integrate(integrand, -r, r, quad, kernel.breakpoints());
}

}  // namespace resdens
