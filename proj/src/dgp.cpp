#include "resdens/dgp.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "resdens/error.hpp"

namespace resdens {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Beta(4,4) rescaled to [-3 sigma, 3 sigma] has variance sigma^2.
constexpr double kBetaShape = 4.0;
constexpr double kBetaHalfWidth = 3.0;

}  // namespace

DGPSpec DGPSpec::default_acceptance() { return DGPSpec{}; }

void DGPSpec::validate() const {
  const auto d = static_cast<std::size_t>(dim);
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  if (support_lo.size() != d || support_hi.size() != d || trim_lo.size() != d ||
      trim_hi.size() != d) {
    throw ConfigError("support and trim boxes must have " + std::to_string(d) +
                      " coordinates");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(support_lo[j] < support_hi[j])) throw ConfigError("empty support box");
  }
  const auto trim = trim_region();
  if (!trim.strictly_inside(support_lo, support_hi)) {
    throw ConfigError("trim box must lie strictly inside the covariate support");
  }
  if (f != ErrorLaw::zero && !(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (g == CovariateLaw::truncated_normal && !(g_sd > 0.0)) {
    throw ConfigError("truncated normal needs a positive standard deviation");
  }
}

double DGPSpec::regression(std::span<const double> x) const {
  double s = 0.0;
  switch (m) {
    case RegressionFn::constant:
      return m_intercept;
    case RegressionFn::affine:
      s = m_intercept;
      for (double v : x) s += m_slope * v;
      return s;
    case RegressionFn::quadratic:
      for (double v : x) s += v * v;
      return s;
    case RegressionFn::sinusoid:
      for (double v : x) s += std::sin(kTwoPi * v);
      return s;
  }
  return s;
}

double DGPSpec::covariate_density(std::span<const double> x) const {
  double dens = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double lo = support_lo[j];
    const double hi = support_hi[j];
    if (x[j] < lo || x[j] > hi) return 0.0;
    if (g == CovariateLaw::uniform) {
      dens /= hi - lo;
    } else {
      const double mass = normal_cdf((hi - g_mean) / g_sd) - normal_cdf((lo - g_mean) / g_sd);
      const double z = (x[j] - g_mean) / g_sd;
      dens *= std::exp(-0.5 * z * z) / (g_sd * std::sqrt(kTwoPi) * mass);
    }
  }
  return dens;
}

double DGPSpec::error_density(double e) const {
  switch (f) {
    case ErrorLaw::normal: {
      const double z = e / sigma;
      return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
    }
    case ErrorLaw::laplace: {
      const double s = sigma / std::numbers::sqrt2;
      return std::exp(-std::abs(e) / s) / (2.0 * s);
    }
    case ErrorLaw::beta: {
      const double w = kBetaHalfWidth * sigma;
      if (std::abs(e) >= w) return 0.0;
      const double u = (e + w) / (2.0 * w);
      // 1 / B(4, 4) = 140
      return 140.0 * u * u * u * (1.0 - u) * (1.0 - u) * (1.0 - u) / (2.0 * w);
    }
    case ErrorLaw::zero:
      throw ConfigError("the zero error law has no density");
  }
  return 0.0;
}

double DGPSpec::error_variance() const {
  return f == ErrorLaw::zero ? 0.0 : sigma * sigma;
}

bool DGPSpec::smooth_error_density() const {
  return f == ErrorLaw::normal || f == ErrorLaw::beta;
}

std::vector<double> DGPSpec::draw_covariates(std::size_t n, CounterRng& rng) const {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> x(n * d);
  if (g == CovariateLaw::uniform) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        std::uniform_real_distribution<double> u(support_lo[j], support_hi[j]);
        x[i * d + j] = u(rng);
      }
    }
  } else {
    std::normal_distribution<double> z(g_mean, g_sd);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double v;
        do {
          v = z(rng);
        } while (v < support_lo[j] || v > support_hi[j]);
        x[i * d + j] = v;
      }
    }
  }
  return x;
}

std::vector<double> DGPSpec::draw_errors(std::size_t n, CounterRng& rng) const {
  std::vector<double> eps(n, 0.0);
  switch (f) {
    case ErrorLaw::normal: {
      std::normal_distribution<double> z(0.0, sigma);
      for (auto& e : eps) e = z(rng);
      break;
    }
    case ErrorLaw::laplace: {
      std::exponential_distribution<double> expo(std::numbers::sqrt2 / sigma);
      std::bernoulli_distribution sign(0.5);
      for (auto& e : eps) {
        const double a = expo(rng);
        e = sign(rng) ? a : -a;
      }
      break;
    }
    case ErrorLaw::beta: {
      std::gamma_distribution<double> gam(kBetaShape, 1.0);
      const double w = kBetaHalfWidth * sigma;
      for (auto& e : eps) {
        const double a = gam(rng);
        const double b = gam(rng);
        e = (2.0 * a / (a + b) - 1.0) * w;
      }
      break;
    }
    case ErrorLaw::zero:
      break;
  }
  return eps;
}

RegressionFn parse_regression_fn(std::string_view name) {
  if (name == "constant") return RegressionFn::constant;
  if (name == "affine") return RegressionFn::affine;
  if (name == "quadratic") return RegressionFn::quadratic;
  if (name == "sinusoid") return RegressionFn::sinusoid;
  throw ConfigError("unsupported regression function '" + std::string(name) + "'");
}

CovariateLaw parse_covariate_law(std::string_view name) {
  if (name == "uniform") return CovariateLaw::uniform;
  if (name == "truncated_normal" || name == "truncated-normal") {
    return CovariateLaw::truncated_normal;
  }
  throw ConfigError("unsupported covariate density '" + std::string(name) + "'");
}

ErrorLaw parse_error_law(std::string_view name) {
  if (name == "normal") return ErrorLaw::normal;
  if (name == "laplace" || name == "exponential") return ErrorLaw::laplace;
  if (name == "beta") return ErrorLaw::beta;
  if (name == "zero") return ErrorLaw::zero;
  throw ConfigError("unsupported error law '" + std::string(name) + "'");
}

DesignKind parse_design(std::string_view name) {
  if (name == "random") return DesignKind::random;
  if (name == "equispaced" || name == "grid") return DesignKind::equispaced;
  throw ConfigError("unsupported design '" + std::string(name) + "'");
}

std::string to_string(RegressionFn v) {
  switch (v) {
    case RegressionFn::constant: return "constant";
    case RegressionFn::affine: return "affine";
    case RegressionFn::quadratic: return "quadratic";
    case RegressionFn::sinusoid: return "sinusoid";
  }
  return "?";
}

std::string to_string(CovariateLaw v) {
  return v == CovariateLaw::uniform ? "uniform" : "truncated_normal";
}

std::string to_string(ErrorLaw v) {
  switch (v) {
    case ErrorLaw::normal: return "normal";
    case ErrorLaw::laplace: return "laplace";
    case ErrorLaw::beta: return "beta";
    case ErrorLaw::zero: return "zero";
  }
  return "?";
}

std::string to_string(DesignKind v) {
  return v == DesignKind::random ? "random" : "equispaced";
}

std::vector<double> make_design(const DGPSpec& dgp, std::size_t n, DesignKind kind,
                                std::uint64_t seed) {
  dgp.validate();
  if (n < 2) throw ConfigError("a sample needs n >= 2");
  if (kind == DesignKind::random) {
    CounterRng rng(seed, 0, StreamRole::covariates);
    return dgp.draw_covariates(n, rng);
  }
  const auto d = static_cast<std::size_t>(dgp.dim);
  const auto side = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d))));
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= side;
  if (total != n) {
    throw ConfigError("equispaced design needs n to be a perfect d-th power");
  }
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t k = rest % side;
      rest /= side;
      const double lo = dgp.support_lo[j];
      const double hi = dgp.support_hi[j];
      x[i * d + j] = lo + (static_cast<double>(k) + 0.5) * (hi - lo) /
                              static_cast<double>(side);
    }
  }
  return x;
}

std::vector<double> draw_errors(const DGPSpec& dgp, std::size_t n, std::uint64_t seed,
                                std::uint64_t replication) {
  CounterRng rng(seed, replication, StreamRole::errors);
  return dgp.draw_errors(n, rng);
}

Dataset sample_given_design(const DGPSpec& dgp, std::span<const double> x,
                            std::uint64_t seed, std::uint64_t replication) {
  const auto d = static_cast<std::size_t>(dgp.dim);
  const std::size_t n = x.size() / d;
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = dgp.regression(x.subspan(i * d, d));
  auto eps = draw_errors(dgp, n, seed, replication);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = m[i] + eps[i];
    eps[i] = y[i] - m[i];
  }
  return Dataset(d, std::vector<double>(x.begin(), x.end()), std::move(y), std::move(m),
                 std::move(eps));
}

Dataset generate_sample(const DGPSpec& dgp, std::size_t n, std::uint64_t seed,
                        std::uint64_t replication) {
  dgp.validate();
  if (n < 2) throw ConfigError("a sample needs n >= 2");
  CounterRng rng(seed, replication, StreamRole::covariates);
  const auto x = dgp.draw_covariates(n, rng);
  return sample_given_design(dgp, x, seed, replication);
}

}  // namespace resdens
