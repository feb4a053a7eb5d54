#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "resdens/dgp.hpp"
#include "resdens/error.hpp"
#include "resdens/montecarlo.hpp"

using namespace resdens;

namespace {

double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  const double mu = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

ExperimentConfig small_conditional(Target target) {
  ExperimentConfig cfg;
  cfg.target = target;
  cfg.n_grid = {300};
  cfg.b0_grid = {0.06, 0.09, 0.13, 0.2};
  cfg.b1_grid = {0.1};
  cfg.replications = 20;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("rate fit on exact power laws") {
  const std::vector<double> xs{0.05, 0.1, 0.2, 0.4, 0.8};
  std::vector<double> sq, flat(xs.size(), 3.0);
  for (double x : xs) sq.push_back(x * x);
  const auto f = fit_rate(xs, sq);
  CHECK(std::abs(f.slope - 2.0) <= 1e-12);
  CHECK(f.stderr_slope <= 1e-12);
  CHECK(f.points == 5);
  CHECK(std::abs(fit_rate(xs, flat).slope) <= 1e-12);
}

TEST_CASE("rate fit with multiplicative noise") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<double> xs, ys;
  for (int k = 0; k < 8; ++k) {
    const double x = 0.02 * std::pow(1.5, k);
    xs.push_back(x);
    ys.push_back(x * x * (1.0 + u(gen)));
  }
  const auto f = fit_rate(xs, ys);
  CHECK(f.slope >= 1.9);
  CHECK(f.slope <= 2.1);
  CHECK(f.stderr_slope > 0.0);
}

TEST_CASE("rate fit errors") {
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(fit_rate(three, three), GridError);
  const std::vector<double> xs{1, 2, 2, 3}, ys{1, 1, 1, 1};
  CHECK_THROWS_AS(fit_rate(xs, ys), GridError);
  const std::vector<double> good{1, 2, 3, 4}, bad{1, 0, 1, 1};
  CHECK_THROWS_AS(fit_rate(good, bad), LogDomainError);
  const std::vector<double> shorter{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(fit_rate(good, shorter), GridError);
  const std::vector<double> down{4, 3, 2, 1};
  CHECK(fit_rate(down, good).slope < 0.0);
}

TEST_CASE("simulated samples are deterministic and exact") {
  const auto dgp = DGPSpec::default_acceptance();
  const auto a = generate_sample(dgp, 500, 42);
  const auto b = generate_sample(dgp, 500, 42);
  const auto c = generate_sample(dgp, 500, 43);
  CHECK(std::equal(a.y().begin(), a.y().end(), b.y().begin()));
  CHECK(std::equal(a.x_flat().begin(), a.x_flat().end(), b.x_flat().begin()));
  CHECK_FALSE(std::equal(a.y().begin(), a.y().end(), c.y().begin()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.y(i) - a.true_m()[i] - a.true_eps()[i] == 0.0);
    CHECK(a.true_m()[i] == a.x(i)[0] * a.x(i)[0]);
  }
}

TEST_CASE("error laws are centred with the declared variance") {
  const std::size_t n = 100000;
  for (auto law : {ErrorLaw::normal, ErrorLaw::laplace, ErrorLaw::beta}) {
    auto dgp = DGPSpec::default_acceptance();
    dgp.f = law;
    dgp.sigma = 1.0;
    const auto eps = draw_errors(dgp, n, 7, 0);
    CHECK(std::abs(sample_mean(eps)) <= 4.0 / std::sqrt(static_cast<double>(n)));
    const double v = sample_variance(eps);
    CHECK(v >= 0.95);
    CHECK(v <= 1.05);
  }
}

TEST_CASE("frozen design redraws only the errors") {
  const auto dgp = DGPSpec::default_acceptance();
  const auto base = generate_sample(dgp, 200, 3);
  const auto again = sample_given_design(dgp, base.x_flat(), 3, 1);
  CHECK(std::equal(base.x_flat().begin(), base.x_flat().end(), again.x_flat().begin()));
  CHECK_FALSE(std::equal(base.y().begin(), base.y().end(), again.y().begin()));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  std::vector<double> v{5, 9, 1, 7, 3, 8};
  const double m = median(v);
  std::reverse(v.begin(), v.end());
  CHECK(median(v) == m);
}

TEST_CASE("envelopes") {
  const double b0 = 0.1, b1 = 0.2;
  const std::size_t n = 1000;
  const double s = std::pow(b0, 4) + 1.0 / (n * b0);
  CHECK(target_envelope(Target::prop1_beta, n, b0, b1, 1) == b0 * b0);
  CHECK(target_envelope(Target::lemma3_k4, n, b0, b1, 1) == doctest::Approx(s * s));
  CHECK(target_envelope(Target::lemma3_k6, n, b0, b1, 1) == doctest::Approx(s * s * s));
  CHECK(target_envelope(Target::prop2_sigma, n, b0, b1, 1) ==
        doctest::Approx(n * std::pow(b1, 4) + b1 / b0));
  CHECK(target_envelope(Target::prop4_r, n, b0, b1, 2) ==
        doctest::Approx(1e6 * b0 * b0 * b1 *
                        std::pow(std::pow(b0, 4) + 1.0 / (n * b0 * b0), 3)));
  CHECK(target_envelope(Target::lemma1_stochastic, n, b0, b1, 1) ==
        doctest::Approx(std::sqrt(std::log(1000.0) / 100.0)));
}

TEST_CASE("target and mode names round-trip") {
  for (auto t : {Target::prop1_beta, Target::lemma1_bias, Target::lemma1_stochastic,
                 Target::lemma3_k4, Target::lemma3_k6, Target::prop2_sigma,
                 Target::prop3_zeta, Target::prop4_r}) {
    CHECK(parse_target(to_string(t)) == t);
  }
  CHECK(parse_mode("ratio") == CertMode::ratio);
  CHECK(parse_scale_var("n") == ScaleVar::n);
  CHECK_THROWS_AS(parse_target("prop5"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.b0_grid = {0.1, 0.2, 0.3};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("≥ 4 grid points required"),
                       ConfigError);
  cfg.b0_grid = {0.1, 0.2, 0.3, 0.4};
  CHECK_NOTHROW(cfg.validate());
  cfg.replications = 19;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.replications = 20;
  cfg.b0_grid = {0.1, 0.3, 0.2, 0.4};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  auto cond = small_conditional(Target::prop2_sigma);
  cond.replications = 1;
  CHECK_THROWS_AS(cond.validate(), ConfigError);
  cond.replications = 2;
  CHECK_NOTHROW(cond.validate());
  cond.b1_grid.clear();
  CHECK_THROWS_AS(cond.validate(), ConfigError);

  ExperimentConfig bias;
  bias.target = Target::lemma1_bias;
  bias.vary = ScaleVar::n;
  bias.n_grid = {100, 200, 400, 800};
  bias.b0_grid = {0.1};
  CHECK_THROWS_AS(bias.validate(), ConfigError);
}

TEST_CASE("default certification settings") {
  ExperimentConfig cfg;
  CHECK(cfg.effective_mode() == CertMode::slope);
  CHECK(cfg.effective_claimed() == 2.0);
  cfg.target = Target::lemma3_k6;
  CHECK(cfg.effective_mode() == CertMode::ratio);
  CHECK(cfg.effective_band() == 10.0);
  cfg.mode = CertMode::slope;
  CHECK(cfg.effective_claimed() == 12.0);
}

TEST_CASE("smoothing bias of the density average decays like b0^2") {
  ExperimentConfig cfg;
  cfg.target = Target::lemma1_bias;
  cfg.dgp.g = CovariateLaw::truncated_normal;
  cfg.b0_grid = {0.02, 0.04, 0.08, 0.12, 0.16};
  cfg.replications = 20;
  const auto rep = run_rate_experiment(cfg);
  REQUIRE(rep.fit.has_value());
  CHECK(rep.fit->slope >= 1.9);
  CHECK(rep.fit->slope <= 2.1);
  CHECK(rep.pass);
}

TEST_CASE("reports do not depend on the worker count") {
  auto cfg = small_conditional(Target::prop3_zeta);
  cfg.workers = 1;
  const auto one = run_rate_experiment(cfg);
  cfg.workers = 4;
  const auto four = run_rate_experiment(cfg);
  CHECK(one.to_json() == four.to_json());

  ExperimentConfig median_cfg;
  median_cfg.n_grid = {400};
  median_cfg.b0_grid = {0.08, 0.12, 0.2, 0.3};
  median_cfg.replications = 20;
  median_cfg.workers = 1;
  const auto a = run_rate_experiment(median_cfg);
  median_cfg.workers = 3;
  const auto b = run_rate_experiment(median_cfg);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("report layout") {
  const auto rep = run_rate_experiment(small_conditional(Target::prop2_sigma));
  CHECK(rep.points.size() == 4);
  CHECK(rep.scale_name == "b0");
  CHECK(rep.mode == CertMode::ratio);
  for (const auto& p : rep.points) {
    CHECK(p.statistic > 0.0);
    CHECK(p.ratio == doctest::Approx(p.statistic / p.envelope));
  }
  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str().rfind("scale,n,b0,b1,statistic,envelope,ratio\n", 0) == 0);
  CHECK(rep.pass == (rep.spread <= rep.band));
}

TEST_CASE("experiments with nothing kept abort") {
  ExperimentConfig cfg;
  cfg.n_grid = {20};
  cfg.dgp.trim_lo = {0.5};
  cfg.dgp.trim_hi = {0.5000001};
  cfg.b0_grid = {0.01, 0.02, 0.03, 0.04};
  cfg.replications = 20;
  CHECK_THROWS_AS(run_rate_experiment(cfg), DegenerateExperiment);
}

TEST_CASE("MISE helper") {
  const auto k1 = UnivariateKernel::quadweight();
  const auto r = estimate_mise(DGPSpec::default_acceptance(), 500, 0.15, 0.3, k1, 3, 0);
  CHECK(r.mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.min_value >= 0.0);
  CHECK(r.n_kept > 300);
  CHECK(r.mise > 0.0);
}
