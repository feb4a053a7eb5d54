#include "resdens/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "resdens/decomposition.hpp"
#include "resdens/density.hpp"
#include "resdens/error.hpp"
#include "resdens/smoother.hpp"
#include "resdens/summation.hpp"

namespace resdens {

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw GridError("scales and statistics differ in length");
  if (xs.size() < 4) throw GridError("≥ 4 grid points required");
  const bool up = xs[1] > xs[0];
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (up ? !(xs[k] > xs[k - 1]) : !(xs[k] < xs[k - 1])) {
      throw GridError("scales must be strictly monotone");
    }
  }
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(xs[k] > 0.0) || !std::isfinite(xs[k])) {
      throw LogDomainError("scale " + std::to_string(xs[k]) + " is not positive");
    }
    if (!(ys[k] > 0.0) || !std::isfinite(ys[k])) {
      throw LogDomainError("statistic at point " + std::to_string(k + 1) +
                           " is not positive");
    }
    lx[k] = std::log(xs[k]);
    ly[k] = std::log(ys[k]);
  }
  const double mx = compensated_sum(lx) / static_cast<double>(n);
  const double my = compensated_sum(ly) / static_cast<double>(n);
  NeumaierSum sxx, sxy;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  RateFit fit;
  fit.points = n;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  NeumaierSum sse;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = ly[k] - fit.intercept - fit.slope * lx[k];
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse.value() / static_cast<double>(n - 2) / sxx.value());
  return fit;
}

// ------------------------------------------------------------------ names

Target parse_target(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "prop1_beta") return Target::prop1_beta;
  if (s == "lemma1_bias") return Target::lemma1_bias;
  if (s == "lemma1_stochastic") return Target::lemma1_stochastic;
  if (s == "lemma3_k4") return Target::lemma3_k4;
  if (s == "lemma3_k6") return Target::lemma3_k6;
  if (s == "prop2_sigma") return Target::prop2_sigma;
  if (s == "prop3_zeta") return Target::prop3_zeta;
  if (s == "prop4_r") return Target::prop4_r;
  throw ConfigError("unknown target '" + std::string(name) + "'");
}

std::string to_string(Target t) {
  switch (t) {
    case Target::prop1_beta: return "prop1_beta";
    case Target::lemma1_bias: return "lemma1_bias";
    case Target::lemma1_stochastic: return "lemma1_stochastic";
    case Target::lemma3_k4: return "lemma3_k4";
    case Target::lemma3_k6: return "lemma3_k6";
    case Target::prop2_sigma: return "prop2_sigma";
    case Target::prop3_zeta: return "prop3_zeta";
    case Target::prop4_r: return "prop4_r";
  }
  return "?";
}

CertMode parse_mode(std::string_view name) {
  if (name == "slope") return CertMode::slope;
  if (name == "ratio") return CertMode::ratio;
  throw ConfigError("mode must be 'slope' or 'ratio', got '" + std::string(name) + "'");
}

std::string to_string(CertMode m) { return m == CertMode::slope ? "slope" : "ratio"; }

ScaleVar parse_scale_var(std::string_view name) {
  if (name == "b0") return ScaleVar::b0;
  if (name == "b1") return ScaleVar::b1;
  if (name == "n") return ScaleVar::n;
  throw ConfigError("vary must be b0, b1 or n, got '" + std::string(name) + "'");
}

std::string to_string(ScaleVar v) {
  switch (v) {
    case ScaleVar::b0: return "b0";
    case ScaleVar::b1: return "b1";
    case ScaleVar::n: return "n";
  }
  return "?";
}

// ----------------------------------------------------------------- config

namespace {

bool is_conditional(Target t) {
  return t == Target::lemma3_k4 || t == Target::lemma3_k6 || t == Target::prop2_sigma ||
         t == Target::prop3_zeta || t == Target::prop4_r;
}

bool is_median(Target t) {
  return t == Target::prop1_beta || t == Target::lemma1_stochastic;
}

bool needs_b1(Target t) {
  return t == Target::prop2_sigma || t == Target::prop3_zeta || t == Target::prop4_r;
}

template <class T>
bool strictly_increasing(const std::vector<T>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

}  // namespace

CertMode ExperimentConfig::effective_mode() const {
  if (mode) return *mode;
  switch (target) {
    case Target::prop1_beta:
    case Target::lemma1_bias: return CertMode::slope;
    default: return CertMode::ratio;
  }
}

double ExperimentConfig::effective_claimed() const {
  if (claimed) return *claimed;
  switch (target) {
    case Target::prop1_beta:
    case Target::lemma1_bias: return 2.0;
    case Target::lemma3_k4: return 8.0;
    case Target::lemma3_k6: return 12.0;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

double ExperimentConfig::effective_band() const {
  if (band) return *band;
  if (effective_mode() == CertMode::ratio) {
    return target == Target::lemma1_stochastic ? 8.0 : 10.0;
  }
  switch (target) {
    case Target::prop1_beta: return 0.3;
    case Target::lemma1_bias: return 0.1;
    default: return 1.0;
  }
}

void ExperimentConfig::validate() const {
  dgp.validate();
  quad.validate();
  if (dgp.dim > 4) throw ConfigError("experiments support d <= 4");
  (void)UnivariateKernel::by_name(kernel);
  if (n_grid.empty()) throw ConfigError("n must be given");
  for (auto n : n_grid) {
    if (n < 2) throw ConfigError("n must be at least 2");
  }
  for (double b : b0_grid) {
    if (!(b > 0.0)) throw ConfigError("b0 values must be > 0");
  }
  for (double b : b1_grid) {
    if (!(b > 0.0)) throw ConfigError("b1 values must be > 0");
  }
  if (b0_schedule) b0_schedule->validate();
  if (b1_schedule) b1_schedule->validate();

  auto require_grid = [](std::size_t size, const char* what) {
    if (size < 4) {
      throw ConfigError(std::string("≥ 4 grid points required (") + what + " has " +
                        std::to_string(size) + ")");
    }
  };
  auto single = [](std::size_t size, bool has_schedule, const char* what) {
    if (size > 1) {
      throw ConfigError(std::string(what) + " must be a single value when it is not varied");
    }
    if (size == 0 && !has_schedule) {
      throw ConfigError(std::string(what) + " needs a value or a schedule");
    }
  };

  switch (vary) {
    case ScaleVar::b0:
      require_grid(b0_grid.size(), "b0");
      if (!strictly_increasing(b0_grid)) throw ConfigError("b0 grid must be increasing");
      if (n_grid.size() != 1) throw ConfigError("n must be a single value when b0 varies");
      if (needs_b1(target)) single(b1_grid.size(), b1_schedule.has_value(), "b1");
      break;
    case ScaleVar::b1:
      if (!needs_b1(target)) {
        throw ConfigError("target " + to_string(target) + " does not depend on b1");
      }
      require_grid(b1_grid.size(), "b1");
      if (!strictly_increasing(b1_grid)) throw ConfigError("b1 grid must be increasing");
      if (n_grid.size() != 1) throw ConfigError("n must be a single value when b1 varies");
      single(b0_grid.size(), b0_schedule.has_value(), "b0");
      break;
    case ScaleVar::n:
      if (target == Target::lemma1_bias) {
        throw ConfigError("lemma1_bias does not depend on n");
      }
      require_grid(n_grid.size(), "n");
      if (!strictly_increasing(n_grid)) throw ConfigError("n grid must be increasing");
      single(b0_grid.size(), b0_schedule.has_value(), "b0");
      if (needs_b1(target)) single(b1_grid.size(), b1_schedule.has_value(), "b1");
      break;
  }

  if (is_median(target) && replications < 20) {
    throw ConfigError("median-based targets need replications >= 20");
  }
  if (is_conditional(target) && replications < 2) {
    throw ConfigError("conditional targets need replications >= 2");
  }
  const auto m = effective_mode();
  const double b = effective_band();
  if (!(b > 0.0)) throw ConfigError("band must be > 0");
  if (m == CertMode::ratio && !(b >= 1.0)) throw ConfigError("ratio band must be >= 1");
  if (m == CertMode::slope && !std::isfinite(effective_claimed())) {
    throw ConfigError("slope mode for " + to_string(target) + " needs 'claimed'");
  }
  if (design == DesignKind::equispaced && vary == ScaleVar::n) {
    for (auto n : n_grid) {
      const double root = std::round(std::pow(static_cast<double>(n), 1.0 / dgp.dim));
      if (std::pow(root, dgp.dim) != static_cast<double>(n)) {
        throw ConfigError("equispaced design needs n to be a perfect d-th power");
      }
    }
  }
}

std::vector<GridPoint> ExperimentConfig::points() const {
  std::vector<GridPoint> out;
  auto b0_at = [&](std::size_t n) {
    return b0_grid.empty() ? b0_schedule->value(static_cast<double>(n)) : b0_grid[0];
  };
  auto b1_at = [&](std::size_t n) {
    if (!b1_grid.empty()) return b1_grid[0];
    return b1_schedule ? b1_schedule->value(static_cast<double>(n)) : 0.0;
  };
  switch (vary) {
    case ScaleVar::b0:
      for (double b0 : b0_grid) out.push_back({n_grid[0], b0, b1_at(n_grid[0]), b0});
      break;
    case ScaleVar::b1:
      for (double b1 : b1_grid) out.push_back({n_grid[0], b0_at(n_grid[0]), b1, b1});
      break;
    case ScaleVar::n:
      for (auto n : n_grid) out.push_back({n, b0_at(n), b1_at(n), static_cast<double>(n)});
      break;
  }
  return out;
}

// -------------------------------------------------------------- envelopes

double target_envelope(Target target, std::size_t n_count, double b0, double b1, int d) {
  const double n = static_cast<double>(n_count);
  const double bd = std::pow(b0, d);
  const double s = std::pow(b0, 4) + 1.0 / (n * bd);
  switch (target) {
    case Target::prop1_beta:
    case Target::lemma1_bias: return b0 * b0;
    case Target::lemma1_stochastic: return std::sqrt(std::log(n) / (n * bd));
    case Target::lemma3_k4: return s * s;
    case Target::lemma3_k6: return s * s * s;
    case Target::prop2_sigma: return n * std::pow(b1, 4) + b1 / bd;
    case Target::prop3_zeta: return (n * b1 + n * n * bd * std::pow(b1, 3.5)) * s * s;
    case Target::prop4_r: return n * n * bd * b1 * s * s * s;
  }
  return 1.0;
}

namespace {

struct TermPair {
  std::string label;
  std::string first, second;
};

std::vector<TermPair> competing_terms(Target target) {
  const TermPair s{"s", "b0^4", "1/(n b0^d)"};
  switch (target) {
    case Target::lemma3_k4:
    case Target::lemma3_k6:
    case Target::prop4_r: return {s};
    case Target::prop2_sigma: return {{"noise", "n b1^4", "b1/b0^d"}};
    case Target::prop3_zeta: return {{"curvature", "n b1", "n^2 b0^d b1^3.5"}, s};
    default: return {};
  }
}

std::pair<double, double> term_values(const std::string& label, const GridPoint& p, int d) {
  const double n = static_cast<double>(p.n);
  const double bd = std::pow(p.b0, d);
  if (label == "s") return {std::pow(p.b0, 4), 1.0 / (n * bd)};
  if (label == "noise") return {n * std::pow(p.b1, 4), p.b1 / bd};
  return {n * p.b1, n * n * bd * std::pow(p.b1, 3.5)};
}

std::vector<std::vector<double>> evaluation_grid(const DGPSpec& dgp, std::size_t per_axis) {
  const auto d = static_cast<std::size_t>(dgp.dim);
  if (d > 1) per_axis = std::min<std::size_t>(per_axis, 21);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= per_axis;
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = dgp.trim_lo[a], hi = dgp.trim_hi[a];
      x[a] = per_axis == 1 ? 0.5 * (lo + hi)
                           : lo + (hi - lo) * static_cast<double>(idx[a]) /
                                      static_cast<double>(per_axis - 1);
    }
    pts.push_back(std::move(x));
    for (std::size_t a = 0; a < d && ++idx[a] == per_axis; ++a) idx[a] = 0;
  }
  return pts;
}

Dataset draw_sample(const ExperimentConfig& cfg, std::size_t n, std::uint64_t rep) {
  if (cfg.design == DesignKind::random) return generate_sample(cfg.dgp, n, cfg.seed, rep);
  const auto x = make_design(cfg.dgp, n, DesignKind::equispaced, cfg.seed);
  return sample_given_design(cfg.dgp, x, cfg.seed, rep);
}

// Error redraws use a stream family separate from the frozen sample's own.
std::uint64_t redraw_seed(std::uint64_t seed) { return seed ^ 0x5bd1e9955bd1e995ULL; }

struct PointOutcome {
  double statistic = 0.0;
  std::size_t used = 0;
  std::size_t degenerate = 0;
};

PointOutcome median_over_reps(const ExperimentConfig& cfg,
                              const std::function<std::optional<double>(std::uint64_t)>& one) {
  const std::size_t R = cfg.replications;
  std::vector<double> values(R, 0.0);
  std::vector<std::uint8_t> ok(R, 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(R); ++rr) {
    const auto r = static_cast<std::uint64_t>(rr);
    std::optional<double> v;
    try {
      v = one(r);
    } catch (const AllTrimmed&) {
    } catch (const DegenerateDenominator&) {
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
    if (v && std::isfinite(*v)) {
      values[r] = *v;
      ok[r] = 1;
    }
  }
  if (failure) std::rethrow_exception(failure);
  PointOutcome out;
  std::vector<double> kept;
  for (std::size_t r = 0; r < R; ++r) {
    if (ok[r]) kept.push_back(values[r]);
  }
  out.used = kept.size();
  out.degenerate = R - kept.size();
  out.statistic = kept.empty() ? std::numeric_limits<double>::quiet_NaN() : median(kept);
  return out;
}

PointOutcome run_point(const ExperimentConfig& cfg, const GridPoint& p,
                       const std::vector<std::vector<double>>& xgrid) {
  const auto k1 = UnivariateKernel::by_name(cfg.kernel);
  const ProductKernel k0(k1, cfg.dgp.dim);
  const TrimRegion trim = cfg.dgp.trim_region();
  const DensityFnD g = [&](std::span<const double> x) {
    return cfg.dgp.covariate_density(x);
  };

  switch (cfg.target) {
    case Target::prop1_beta:
      return median_over_reps(cfg, [&](std::uint64_t r) -> std::optional<double> {
        const Dataset data = draw_sample(cfg, p.n, r);
        const LeaveOneOutSmoother sm(data, k0, p.b0);
        const auto terms = decompose(sm, trim);
        double sup = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
          if (!terms.in_trim[i] || !terms.defined[i]) continue;
          any = true;
          sup = std::max(sup, std::abs(terms.beta[i]));
        }
        if (!any) return std::nullopt;
        return sup;
      });

    case Target::lemma1_bias: {
      double sup = 0.0;
      for (const auto& x : xgrid) {
        sup = std::max(sup, std::abs(g_bar_n(g, k0, p.b0, x, cfg.quad) - g(x)));
      }
      return {sup, 1, 0};
    }

    case Target::lemma1_stochastic: {
      std::vector<double> gbar(xgrid.size());
      for (std::size_t k = 0; k < xgrid.size(); ++k) {
        gbar[k] = g_bar_n(g, k0, p.b0, xgrid[k], cfg.quad);
      }
      return median_over_reps(cfg, [&](std::uint64_t r) -> std::optional<double> {
        const Dataset data = draw_sample(cfg, p.n, r);
        const NeighborGrid grid(data, p.b0);
        double sup = 0.0;
        for (std::size_t k = 0; k < xgrid.size(); ++k) {
          sup = std::max(sup, std::abs(g_hat_n(data, grid, k0, p.b0, xgrid[k]) - gbar[k]));
        }
        return sup;
      });
    }

    case Target::lemma3_k4:
    case Target::lemma3_k6: {
      const Dataset data = draw_sample(cfg, p.n, 0);
      const LeaveOneOutSmoother sm(data, k0, p.b0);
      const int k = cfg.target == Target::lemma3_k4 ? 4 : 6;
      const int powers[] = {k};
      const auto cm = conditional_moments(sm, cfg.dgp, trim, powers, cfg.replications,
                                          redraw_seed(cfg.seed));
      return {cm.sup[0], cfg.replications, 0};
    }

    case Target::prop2_sigma:
    case Target::prop3_zeta:
    case Target::prop4_r: {
      const Dataset data = draw_sample(cfg, p.n, 0);
      const LeaveOneOutSmoother sm(data, k0, p.b0);
      const auto stat = cfg.target == Target::prop2_sigma  ? SumStatistic::s_sigma
                        : cfg.target == Target::prop3_zeta ? SumStatistic::s_zeta
                                                           : SumStatistic::s_r;
      const double v = conditional_variance_of_sum(stat, sm, cfg.dgp, trim, k1, p.b1, cfg.e,
                                                   cfg.replications, redraw_seed(cfg.seed));
      return {v, cfg.replications, 0};
    }
  }
  return {};
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw GridError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

RateReport run_rate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RateReport rep;
  rep.target = cfg.target;
  rep.mode = cfg.effective_mode();
  rep.scale_name = to_string(cfg.vary);
  rep.claimed = cfg.effective_claimed();
  rep.band = cfg.effective_band();
  rep.replications = cfg.target == Target::lemma1_bias ? 0 : cfg.replications;
  rep.seed = cfg.seed;

  if (cfg.b0_schedule) {
    const PowerSchedule b1 = cfg.b1_schedule.value_or(PowerSchedule{1.0, 0.2});
    const auto adm = cfg.b1_schedule ? validate_bandwidths(*cfg.b0_schedule, b1, cfg.dgp.dim)
                                     : validate_a8(*cfg.b0_schedule, cfg.dgp.dim);
    for (const auto& name : adm.failures()) {
      rep.warnings.push_back("schedule violates " + name + " (advisory; run proceeds)");
    }
  } else if (cfg.b1_schedule) {
    for (const auto& name : validate_a9(*cfg.b1_schedule, cfg.dgp.dim).failures()) {
      rep.warnings.push_back("schedule violates " + name + " (advisory; run proceeds)");
    }
  }
  if (!cfg.dgp.smooth_error_density() &&
      (cfg.target == Target::prop2_sigma || cfg.target == Target::prop3_zeta ||
       cfg.target == Target::prop4_r)) {
    rep.warnings.push_back("error density is not twice differentiable");
  }

  const auto pairs = competing_terms(cfg.target);
  for (const auto& tp : pairs) rep.dominance_labels.push_back(tp.first + " vs " + tp.second);
  const auto xgrid = evaluation_grid(cfg.dgp, cfg.x_grid_points);

  for (const auto& p : cfg.points()) {
    const auto outcome = run_point(cfg, p, xgrid);
    RatePoint rp;
    rp.at = p;
    rp.statistic = outcome.statistic;
    rp.used = outcome.used;
    rp.degenerate = outcome.degenerate;
    rp.envelope = target_envelope(cfg.target, p.n, p.b0, p.b1, cfg.dgp.dim);
    rp.ratio = rp.statistic / rp.envelope;
    for (const auto& tp : pairs) {
      const auto [a, b] = term_values(tp.label, p, cfg.dgp.dim);
      rp.dominance.push_back(std::max(a, b) / std::min(a, b));
      rp.dominant.push_back(a >= b ? tp.first : tp.second);
    }
    rep.degenerate_total += outcome.degenerate;
    rep.evaluations_total += outcome.used + outcome.degenerate;
    rep.points.push_back(std::move(rp));
  }

  if (rep.evaluations_total > 0 &&
      10 * rep.degenerate_total > rep.evaluations_total) {
    throw DegenerateExperiment(std::to_string(rep.degenerate_total) + " of " +
                               std::to_string(rep.evaluations_total) +
                               " replications degenerate (limit 10%)");
  }

  // Regime: which term of each pair dominates, and whether by >= 10x everywhere.
  if (pairs.empty()) {
    rep.regime = "single term";
  } else {
    std::ostringstream reg;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      bool same = true, strong = true;
      for (const auto& rp : rep.points) {
        same = same && rp.dominant[k] == rep.points[0].dominant[k];
        strong = strong && rp.dominance[k] >= 10.0;
      }
      if (k) reg << "; ";
      if (same && strong) {
        reg << rep.points[0].dominant[k] << " dominates (>= 10x)";
      } else if (same) {
        reg << rep.points[0].dominant[k] << " leads (< 10x at some points)";
      } else {
        reg << "mixed " << rep.dominance_labels[k];
      }
    }
    rep.regime = reg.str();
  }

  std::vector<double> xs, ys, es;
  for (const auto& rp : rep.points) {
    xs.push_back(rp.at.scale);
    ys.push_back(rp.statistic);
    es.push_back(rp.envelope);
  }
  try {
    rep.fit = fit_rate(xs, ys);
  } catch (const Error& err) {
    rep.warnings.push_back(std::string("slope not fitted: ") + err.what());
  }
  try {
    rep.envelope_fit = fit_rate(xs, es);
  } catch (const Error&) {
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool finite = true;
  for (const auto& rp : rep.points) {
    if (!std::isfinite(rp.ratio) || !(rp.ratio > 0.0)) finite = false;
    lo = std::min(lo, rp.ratio);
    hi = std::max(hi, rp.ratio);
  }
  rep.spread = finite ? hi / lo : std::numeric_limits<double>::infinity();

  if (rep.mode == CertMode::slope) {
    rep.pass = rep.fit && std::abs(rep.fit->slope - rep.claimed) <= rep.band;
  } else {
    rep.pass = finite && rep.spread <= rep.band;
  }
  return rep;
}

namespace {

nlohmann::json fit_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},
          {"intercept", f->intercept},
          {"stderr", f->stderr_slope},
          {"points", f->points}};
}

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string RateReport::to_json() const {
  nlohmann::json j;
  j["target"] = to_string(target);
  j["mode"] = to_string(mode);
  j["scale"] = scale_name;
  j["claimed"] = num(claimed);
  j["band"] = band;
  j["fit"] = fit_json(fit);
  j["slope"] = fit ? num(fit->slope) : nlohmann::json(nullptr);
  j["slope_stderr"] = fit ? num(fit->stderr_slope) : nlohmann::json(nullptr);
  j["envelope_fit"] = fit_json(envelope_fit);
  j["ratio_spread"] = num(spread);
  j["pass"] = pass;
  j["regime"] = regime;
  j["dominance_labels"] = dominance_labels;
  j["replications"] = replications;
  j["seed"] = seed;
  j["degenerate"] = degenerate_total;
  j["evaluations"] = evaluations_total;
  j["warnings"] = warnings;
  j["points"] = nlohmann::json::array();
  for (const auto& rp : points) {
    nlohmann::json p;
    p["scale"] = rp.at.scale;
    p["n"] = rp.at.n;
    p["b0"] = rp.at.b0;
    p["b1"] = rp.at.b1;
    p["statistic"] = num(rp.statistic);
    p["envelope"] = num(rp.envelope);
    p["ratio"] = num(rp.ratio);
    p["log_scale"] = std::log(rp.at.scale);
    p["log_statistic"] = rp.statistic > 0.0 ? num(std::log(rp.statistic)) : nullptr;
    p["used"] = rp.used;
    p["degenerate"] = rp.degenerate;
    p["dominance"] = rp.dominance;
    p["dominant"] = rp.dominant;
    j["points"].push_back(std::move(p));
  }
  return j.dump(2);
}

void RateReport::write_csv(std::ostream& out) const {
  out << std::setprecision(17);
  out << "scale,n,b0,b1,statistic,envelope,ratio\n";
  for (const auto& rp : points) {
    out << rp.at.scale << ',' << rp.at.n << ',' << rp.at.b0 << ',' << rp.at.b1 << ','
        << rp.statistic << ',' << rp.envelope << ',' << rp.ratio << '\n';
  }
}

std::string RateReport::summary() const {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "target " << to_string(target) << " (" << to_string(mode) << " vs " << scale_name
      << ")\n";
  out << "  " << std::setw(12) << scale_name << std::setw(14) << "statistic" << std::setw(14)
      << "envelope" << std::setw(14) << "ratio" << '\n';
  for (const auto& rp : points) {
    out << "  " << std::setw(12) << rp.at.scale << std::setw(14) << rp.statistic
        << std::setw(14) << rp.envelope << std::setw(14) << rp.ratio << '\n';
  }
  if (fit) {
    out << "  fitted slope " << fit->slope << " (stderr " << fit->stderr_slope << ")";
    if (envelope_fit) out << ", envelope slope " << envelope_fit->slope;
    out << '\n';
  }
  out << "  ratio max/min " << spread << "\n  regime: " << regime << '\n';
  if (mode == CertMode::slope) {
    out << "  claimed slope " << claimed << " +- " << band;
  } else {
    out << "  ratio band <= " << band;
  }
  out << ": " << (pass ? "PASS" : "FAIL") << '\n';
  for (const auto& w : warnings) out << "  warning: " << w << '\n';
  return out.str();
}

MiseResult estimate_mise(const DGPSpec& dgp, std::size_t n, double b0, double b1,
                         const UnivariateKernel& k1, std::uint64_t seed,
                         std::uint64_t replication) {
  const Dataset data = generate_sample(dgp, n, seed, replication);
  const ProductKernel k0(k1, dgp.dim);
  const auto fit = fit_residuals(data, k0, b0, dgp.trim_region());
  const auto own = fhat(fit, k1, b1);
  MiseResult res;
  res.mass = own.trapezoid_mass();
  res.min_value = *std::min_element(own.values.begin(), own.values.end());
  res.n_kept = own.n_kept;
  const double reach = 8.0 * dgp.sigma;
  const double lo = std::min(own.grid.front(), -reach);
  const double hi = std::max(own.grid.back(), reach);
  constexpr std::size_t kPoints = 2049;
  std::vector<double> grid(kPoints);
  for (std::size_t k = 0; k < kPoints; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kPoints - 1);
  }
  grid.back() = hi;
  const auto wide = fhat(fit, k1, b1, grid);
  res.mise = mise(wide, [&](double e) { return dgp.error_density(e); });
  return res;
}

}  // namespace resdens
