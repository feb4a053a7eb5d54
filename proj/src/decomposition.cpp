#include "resdens/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "resdens/error.hpp"
#include "resdens/summation.hpp"

namespace resdens {

DecompositionTerms decompose(const LeaveOneOutSmoother& smoother, const TrimRegion& trim) {
  const Dataset& data = smoother.data();
  const auto m = data.true_m();
  const auto eps = data.true_eps();
  const std::size_t n = data.size();
  DecompositionTerms terms;
  terms.b0 = smoother.b0();
  terms.beta.assign(n, 0.0);
  terms.sigma.assign(n, 0.0);
  terms.g_hat.assign(n, 0.0);
  terms.in_trim.assign(n, 0);
  terms.defined.assign(n, 1);
  const auto& table = smoother.table();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto idx = table.neighbors(i);
    const auto w = table.weights(i);
    NeumaierSum den, bias, noise;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      den += w[k];
      bias += (m[idx[k]] - m[i]) * w[k];
      noise += eps[idx[k]] * w[k];
    }
    terms.g_hat[i] = den.value() / smoother.scale();
    if (!trim.contains(data.x(i))) continue;
    terms.in_trim[i] = 1;
    if (!(den.value() > 0.0)) {
      terms.defined[i] = 0;
      continue;
    }
    terms.beta[i] = bias.value() / den.value();
    terms.sigma[i] = noise.value() / den.value();
  }
  return terms;
}

namespace {

// Shared body of beta_in / sigma_in: sum_{j != i} v_j w_ij / sum w_ij.
template <class Value>
double trimmed_ratio(const Dataset& data, const ProductKernel& k0, double b0,
                     const TrimRegion& trim, std::size_t i, Value&& value) {
  check_bandwidth(b0, "b0");
  if (i >= data.size()) throw DataError("observation index out of range");
  const auto xi = data.x(i);
  if (!trim.contains(xi)) return 0.0;
  NeumaierSum num, den;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (j == i) continue;
    const double w = k0.eval_scaled_difference(data.x(j), xi, b0);
    if (w == 0.0) continue;
    num += value(j) * w;
    den += w;
  }
  if (!(den.value() > 0.0)) {
    throw DegenerateDenominator("observation " + std::to_string(i) +
                                " is in the trim box but g_hat_in = 0");
  }
  return num.value() / den.value();
}

}  // namespace

double beta_in(const Dataset& data, const ProductKernel& k0, double b0,
               const TrimRegion& trim, std::size_t i) {
  const auto m = data.true_m();
  return trimmed_ratio(data, k0, b0, trim, i,
                       [&](std::size_t j) { return m[j] - m[i]; });
}

double sigma_in(const Dataset& data, const ProductKernel& k0, double b0,
                const TrimRegion& trim, std::size_t i) {
  const auto eps = data.true_eps();
  return trimmed_ratio(data, k0, b0, trim, i, [&](std::size_t j) { return eps[j]; });
}

namespace {

// Values of t in (0, 1) where a - t h hits a support edge.
std::vector<double> remainder_breakpoints(const UnivariateKernel& k1, double a, double h) {
  std::vector<double> pts;
  if (h == 0.0) return pts;
  for (double edge : k1.breakpoints()) {
    const double t = (a - edge) / h;
    if (t > 0.0 && t < 1.0) pts.push_back(t);
  }
  return pts;
}

}  // namespace

double taylor_remainder_integral(const UnivariateKernel& k1, double a, double h,
                                 const QuadratureSpec& quad) {
  const auto pts = remainder_breakpoints(k1, a, h);
  return integrate(
      [&](double t) { return (1.0 - t) * (1.0 - t) * k1.eval(3, a - t * h); }, 0.0, 1.0,
      quad, pts);
}

double taylor_remainder_integral(const UnivariateKernel& k1, double a, double h) {
  auto pts = remainder_breakpoints(k1, a, h);
  std::sort(pts.begin(), pts.end());
  const auto& rule = default_gauss_legendre();
  auto integrand = [&](double t) {
    return (1.0 - t) * (1.0 - t) * k1.eval(3, a - t * h);
  };
  NeumaierSum acc;
  double lo = 0.0;
  for (double p : pts) {
    acc += rule.apply(integrand, lo, p);
    lo = p;
  }
  acc += rule.apply(integrand, lo, 1.0);
  return acc.value();
}

std::vector<TaylorTerms> taylor_terms(const ResidualFit& fit, const Dataset& data,
                                      const UnivariateKernel& k1, double b1, double e,
                                      const QuadratureSpec& quad) {
  check_bandwidth(b1, "b1");
  quad.validate();
  const auto m = data.true_m();
  const auto eps = data.true_eps();
  const std::size_t n = data.size();
  std::vector<TaylorTerms> out(n);
  bool failed = false;
  double worst = 0.0;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (!fit.defined[i]) continue;
    const double h = fit.m_hat[i] - m[i];
    const double a = (eps[i] - e) / b1;
    auto& t = out[i];
    try {
      t.i_rem = taylor_remainder_integral(k1, a, h / b1, quad);
    } catch (const QuadratureError& err) {
#pragma omp critical
      {
        failed = true;
        worst = std::max(worst, err.last_deviation());
      }
      continue;
    }
    if (fit.kept[i]) {
      t.zeta = h * h * k1.eval(2, a);
      t.r = h * h * h * t.i_rem;
    }
  }
  if (failed) throw QuadratureError("remainder integral did not converge", worst);
  return out;
}

PropSums prop_sums(const DecompositionTerms& terms, std::span<const TaylorTerms> taylor,
                   const Dataset& data, const UnivariateKernel& k1, double e, double b1) {
  check_bandwidth(b1, "b1");
  const auto eps = data.true_eps();
  NeumaierSum sb, ss, sz, sr;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k = k1.eval(1, (eps[i] - e) / b1);
    sb += terms.beta[i] * k;
    ss += terms.sigma[i] * k;
    sz += taylor[i].zeta;
    sr += taylor[i].r;
  }
  return {sb.value(), ss.value(), sz.value(), sr.value()};
}

double nu_bar(const DGPSpec& dgp, const ProductKernel& k0, double b0,
              std::span<const double> x, const TrimRegion& trim,
              const QuadratureSpec& quad) {
  check_bandwidth(b0, "b0");
  if (!trim.contains(x)) return 0.0;
  const auto d = static_cast<std::size_t>(k0.dim());
  const double mx = dgp.regression(x);
  const std::vector<double> lo(d, -0.5), hi(d, 0.5);
  std::vector<double> shifted(d);
  return integrate_box(
      [&](std::span<const double> z) {
        const double k = k0.eval(z);
        if (k == 0.0) return 0.0;
        for (std::size_t a = 0; a < d; ++a) shifted[a] = x[a] + b0 * z[a];
        return (dgp.regression(shifted) - mx) * k * dgp.covariate_density(shifted);
      },
      lo, hi, quad);
}

AuxiliaryStats auxiliary_stats(const LeaveOneOutSmoother& smoother,
                               const DecompositionTerms& terms, const DGPSpec& dgp,
                               const TrimRegion& trim, const QuadratureSpec& quad) {
  const Dataset& data = smoother.data();
  const auto m = data.true_m();
  const std::size_t n = data.size();
  const auto& table = smoother.table();
  const double scale = smoother.scale();
  const double b0 = smoother.b0();
  const double bd = std::pow(b0, static_cast<double>(data.dim()));

  AuxiliaryStats aux;
  aux.nu.assign(n, 0.0);
  aux.nu_bar.assign(n, 0.0);
  aux.g_tilde.assign(n, 0.0);
  aux.g_cross.assign(n, 0.0);
  aux.g_quartic.assign(n, 0.0);

  std::vector<double> row_sum(n);
  for (std::size_t i = 0; i < n; ++i) row_sum[i] = smoother.weight_sum(i);

  bool failed = false;
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto idx = table.neighbors(i);
    const auto w = table.weights(i);
    NeumaierSum sq, quart, cross, bias;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double w2 = w[k] * w[k];
      sq += w2;
      quart += w2 * w2;
      // K0 is symmetric, so w_ki = w_ik and row k sums K0((X_j - X_k)/b0).
      cross += w[k] * (row_sum[idx[k]] - w[k]);
      bias += (m[idx[k]] - m[i]) * w[k];
    }
    aux.g_tilde[i] = sq.value() / scale;
    aux.g_quartic[i] = quart.value() / scale;
    aux.g_cross[i] = cross.value() / (scale * scale);
    if (terms.in_trim[i]) {
      try {
        aux.nu_bar[i] = nu_bar(dgp, smoother.kernel(), b0, data.x(i), trim, quad);
      } catch (const QuadratureError& err) {
#pragma omp critical
        {
          failed = true;
          worst = std::max(worst, err.last_deviation());
        }
      }
      aux.nu[i] = bias.value() / (static_cast<double>(n - 1) * bd) - aux.nu_bar[i];
    }
  }
  if (failed) throw QuadratureError("nu_bar quadrature did not converge", worst);

  NeumaierSum c1, c2, c3;
  double m_big = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!terms.in_trim[i] || !terms.defined[i]) continue;
    const double gh = terms.g_hat[i];
    c1 += aux.g_cross[i] / gh;
    c2 += aux.g_tilde[i] / gh;
    c3 += aux.g_tilde[i] / (gh * gh);
    const double mass = scale * gh;
    const double candidate = terms.beta[i] * terms.beta[i] +
                             std::abs(terms.beta[i]) / mass +
                             scale * aux.g_tilde[i] / (mass * mass);
    m_big = std::max(m_big, candidate);
  }
  aux.cross_over_ghat = c1.value();
  aux.tilde_over_ghat = c2.value();
  aux.tilde_over_ghat2 = c3.value();
  aux.m_big = m_big;
  return aux;
}

// ------------------------------------------------------------ replications

namespace {

void require_replications(std::size_t r) {
  if (r < 2) {
    throw InsufficientReplications("at least two replications are required, got " +
                                   std::to_string(r));
  }
}

std::vector<double> responses(std::span<const double> m, std::span<double> eps) {
  std::vector<double> y(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    y[i] = m[i] + eps[i];
    eps[i] = y[i] - m[i];
  }
  return y;
}

}  // namespace

ConditionalMoments conditional_moments(const LeaveOneOutSmoother& smoother,
                                       const DGPSpec& dgp, const TrimRegion& trim,
                                       std::span<const int> powers, std::size_t replications,
                                       std::uint64_t seed) {
  require_replications(replications);
  for (int k : powers) {
    if (k < 1) throw ConfigError("moment powers must be positive");
  }
  const Dataset& data = smoother.data();
  const auto m = data.true_m();
  const std::size_t n = data.size();
  const std::size_t np = powers.size();
  std::vector<std::uint8_t> in_trim(n);
  for (std::size_t i = 0; i < n; ++i) in_trim[i] = trim.contains(data.x(i)) ? 1 : 0;

  // draws[(r * np + p) * n + i]
  std::vector<double> draws(replications * np * n, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(replications); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    auto eps = draw_errors(dgp, n, seed, r);
    const auto y = responses(m, eps);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_trim[i]) continue;
      const auto mh = smoother.smooth(i, y);
      if (!mh) continue;
      const double z = *mh - m[i];
      for (std::size_t p = 0; p < np; ++p) {
        draws[(r * np + p) * n + i] = std::pow(z, powers[p]);
      }
    }
  }

  ConditionalMoments out;
  out.powers.assign(powers.begin(), powers.end());
  out.replications = replications;
  out.per_obs.assign(np, std::vector<double>(n, 0.0));
  out.sup.assign(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      NeumaierSum acc;
      for (std::size_t r = 0; r < replications; ++r) acc += draws[(r * np + p) * n + i];
      out.per_obs[p][i] = acc.value() / static_cast<double>(replications);
    }
    double sup = 0.0;
    for (double v : out.per_obs[p]) sup = std::max(sup, std::abs(v));
    out.sup[p] = sup;
  }
  return out;
}

SumStatistic parse_sum_statistic(std::string_view name) {
  if (name == "s_beta") return SumStatistic::s_beta;
  if (name == "s_sigma") return SumStatistic::s_sigma;
  if (name == "s_zeta") return SumStatistic::s_zeta;
  if (name == "s_r") return SumStatistic::s_r;
  throw ConfigError("unknown aggregate '" + std::string(name) + "'");
}

std::vector<double> replicate_sum(SumStatistic statistic, const LeaveOneOutSmoother& smoother,
                                  const DGPSpec& dgp, const TrimRegion& trim,
                                  const UnivariateKernel& k1, double b1, double e,
                                  std::size_t replications, std::uint64_t seed) {
  check_bandwidth(b1, "b1");
  const Dataset& data = smoother.data();
  const auto m = data.true_m();
  const std::size_t n = data.size();
  const auto& table = smoother.table();
  std::vector<std::uint8_t> in_trim(n);
  std::vector<double> beta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    in_trim[i] = trim.contains(data.x(i)) ? 1 : 0;
    if (statistic == SumStatistic::s_beta && in_trim[i]) {
      const auto idx = table.neighbors(i);
      const auto w = table.weights(i);
      NeumaierSum num, den;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        num += (m[idx[k]] - m[i]) * w[k];
        den += w[k];
      }
      if (den.value() > 0.0) beta[i] = num.value() / den.value();
    }
  }

  std::vector<double> values(replications, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(replications); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    auto eps = draw_errors(dgp, n, seed, r);
    const auto y = responses(m, eps);
    NeumaierSum acc;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_trim[i]) continue;
      const double a = (eps[i] - e) / b1;
      switch (statistic) {
        case SumStatistic::s_beta:
          acc += beta[i] * k1.eval(1, a);
          break;
        case SumStatistic::s_sigma: {
          const auto s = smoother.smooth(i, eps);
          if (s) acc += *s * k1.eval(1, a);
          break;
        }
        case SumStatistic::s_zeta: {
          const auto mh = smoother.smooth(i, y);
          if (mh) {
            const double h = *mh - m[i];
            acc += h * h * k1.eval(2, a);
          }
          break;
        }
        case SumStatistic::s_r: {
          const auto mh = smoother.smooth(i, y);
          if (mh) {
            const double h = *mh - m[i];
            acc += h * h * h * taylor_remainder_integral(k1, a, h / b1);
          }
          break;
        }
      }
    }
    values[r] = acc.value();
  }
  return values;
}

double conditional_variance_of_sum(SumStatistic statistic,
                                   const LeaveOneOutSmoother& smoother, const DGPSpec& dgp,
                                   const TrimRegion& trim, const UnivariateKernel& k1,
                                   double b1, double e, std::size_t replications,
                                   std::uint64_t seed) {
  require_replications(replications);
  const auto values =
      replicate_sum(statistic, smoother, dgp, trim, k1, b1, e, replications, seed);
  const double mean = compensated_sum(values) / static_cast<double>(values.size());
  NeumaierSum ss;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss.value() / static_cast<double>(values.size() - 1);
}

void write_diagnostics_csv(std::ostream& out, const DecompositionTerms& terms,
                           std::span<const TaylorTerms> taylor, const AuxiliaryStats& aux,
                           const ResidualFit& fit) {
  out << std::setprecision(17);
  out << "i,beta,sigma,zeta,r,g_hat,g_tilde,trimmed\n";
  for (std::size_t i = 0; i < terms.beta.size(); ++i) {
    out << (i + 1) << ',' << terms.beta[i] << ',' << terms.sigma[i] << ','
        << taylor[i].zeta << ',' << taylor[i].r << ',' << terms.g_hat[i] << ','
        << aux.g_tilde[i] << ',' << static_cast<int>(fit.kept[i]) << '\n';
  }
}

}  // namespace resdens
