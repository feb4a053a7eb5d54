#include <sstream>
#include <string>

#include "doctest.h"
#include "resdens/config.hpp"
#include "resdens/error.hpp"

using namespace resdens;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

}  // namespace

TEST_CASE("flat key-value format") {
  const auto cfg = parse(
      "# comment\n"
      "target = lemma3_k4\n"
      "d = 1\n"
      "m = affine\n"
      "m_slope = 2.5\n"
      "f = laplace\n"
      "sigma = 0.3\n"
      "n = 1000\n"
      "b0 = 0.05, 0.1, 0.2, 0.3   # trailing comment\n"
      "replications = 30\n"
      "seed = 17\n"
      "band = 12\n");
  CHECK(cfg.target == Target::lemma3_k4);
  CHECK(cfg.dgp.m == RegressionFn::affine);
  CHECK(cfg.dgp.m_slope == 2.5);
  CHECK(cfg.dgp.f == ErrorLaw::laplace);
  CHECK(cfg.dgp.sigma == 0.3);
  CHECK(cfg.n_grid == std::vector<std::size_t>{1000});
  CHECK(cfg.b0_grid == std::vector<double>{0.05, 0.1, 0.2, 0.3});
  CHECK(cfg.vary == ScaleVar::b0);
  CHECK(cfg.replications == 30);
  CHECK(cfg.seed == 17);
  CHECK(cfg.effective_band() == 12.0);
}

TEST_CASE("JSON format") {
  const auto cfg = parse(R"({
    "target": "prop2_sigma",
    "n": 500,
    "b0": [0.04, 0.06, 0.09, 0.13],
    "b1": 0.05,
    "e": 0.25,
    "replications": 50,
    "trim_lo": [0.2],
    "trim_hi": 0.8
  })");
  CHECK(cfg.target == Target::prop2_sigma);
  CHECK(cfg.b1_grid == std::vector<double>{0.05});
  CHECK(cfg.e == 0.25);
  CHECK(cfg.dgp.trim_lo == std::vector<double>{0.2});
  CHECK(cfg.dgp.trim_hi == std::vector<double>{0.8});
}

TEST_CASE("n grid with schedules infers the varied quantity") {
  const auto cfg = parse(
      "target = lemma1_stochastic\n"
      "n = 500, 1000, 2000, 4000\n"
      "b0_c = 0.5\n"
      "b0_a = 0.2\n");
  CHECK(cfg.vary == ScaleVar::n);
  REQUIRE(cfg.b0_schedule.has_value());
  CHECK(cfg.b0_schedule->c == 0.5);
  CHECK(cfg.points().size() == 4);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("target = prop1_beta\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 10\nn = 20\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 10\nn_grid = 20\n"), ConfigError);
  CHECK_THROWS_AS(parse("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse("{\"n\": \"many\"}"), ConfigError);
  CHECK_THROWS_AS(parse("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse("target = prop9\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("target = prop1_beta\nn = 2000\nb0 = 0.1, 0.2, 0.3\n"),
                       doctest::Contains("≥ 4 grid points required"), ConfigError);
  CHECK_THROWS_AS(read_experiment_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"rates_prop1", "rates_prop1_random", "lemma1_bias",
                           "lemma1_stochastic", "lemma3_k4", "lemma3_k6",
                           "lemma3_k4_bias_regime", "prop2_sigma", "prop3_zeta", "prop4_r"}) {
    CAPTURE(name);
    CHECK_NOTHROW(read_experiment_config(std::string(RESDENS_SOURCE_DIR) + "/configs/" + name +
                                         ".cfg"));
  }
}
