#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "resdens/bandwidth.hpp"
#include "resdens/error.hpp"

using namespace resdens;

namespace {

bool a8(double a, int d) { return validate_a8({1.0, a}, d).conditions.at(0).satisfied; }
bool a9(double g, int d) { return validate_a9({1.0, g}, d).conditions.at(0).satisfied; }

}  // namespace

TEST_CASE("d_star") {
  CHECK(d_star(1) == 3);
  CHECK(d_star(2) == 4);
  CHECK(d_star(3) == 6);
  CHECK(d_star(5) == 10);
  CHECK_THROWS_AS(d_star(0), DimensionError);
}

TEST_CASE("regression bandwidth verdicts") {
  CHECK(a8(0.2, 1));
  CHECK_FALSE(a8(1.0 / 3.0, 1));
  CHECK_FALSE(a8(parse_number("1/3"), 1));
  CHECK(a8(0.2, 2));
  CHECK_FALSE(a8(0.4, 1));
  CHECK_FALSE(a8(0.0, 1));
  CHECK_FALSE(a8(-0.1, 1));
  const auto rep = validate_a8({1.0, 0.2}, 1);
  REQUIRE(rep.conditions.size() == 2);
  CHECK(rep.conditions[1].name == "A8.log");
  CHECK(rep.conditions[1].satisfied);
  CHECK(rep.d_star == 3);
}

TEST_CASE("density bandwidth verdicts") {
  CHECK(a9(0.2, 1));
  CHECK_FALSE(a9(9.0 / 35.0, 1));
  CHECK_FALSE(a9(parse_number("9/35"), 1));
  CHECK_FALSE(a9(0.24, 3));
  CHECK(a9(0.22, 3));
  CHECK_FALSE(a9(0.0, 1));
}

TEST_CASE("combined report names the failing condition") {
  const auto ok = validate_bandwidths({0.5, 0.2}, {1.0, 0.2}, 1);
  CHECK(ok.all_satisfied());
  CHECK(ok.failures().empty());
  const auto bad = validate_bandwidths({0.5, 0.4}, {1.0, 0.2}, 1);
  CHECK_FALSE(bad.all_satisfied());
  REQUIRE(bad.failures().size() == 1);
  CHECK(bad.failures()[0] == "A8");
  CHECK(bad.to_text().find("FAIL  A8:") != std::string::npos);
}

TEST_CASE("admissible region shrinks monotonically") {
  for (int d = 1; d <= 4; ++d) {
    for (double a = 0.01; a < 0.6; a += 0.01) {
      for (double g = 0.01; g < 0.4; g += 0.01) {
        if (!validate_bandwidths({1.0, a}, {1.0, g}, d).all_satisfied()) continue;
        CHECK(validate_bandwidths({1.0, a / 2}, {1.0, g}, d).all_satisfied());
        CHECK(validate_bandwidths({1.0, a}, {1.0, g / 2}, d).all_satisfied());
      }
    }
  }
}

TEST_CASE("json rendering") {
  const auto j = nlohmann::json::parse(validate_bandwidths({1.0, 0.4}, {1.0, 0.2}, 1).to_json());
  CHECK(j["d"] == 1);
  CHECK(j["d_star"] == 3);
  CHECK(j["all_satisfied"] == false);
  REQUIRE(j["conditions"].size() == 3);
  CHECK(j["conditions"][0]["name"] == "A8");
  CHECK(j["conditions"][0]["satisfied"] == false);
  CHECK(j["conditions"][0]["margin"].get<double>() < 0.0);
  CHECK(j["conditions"][2]["heuristic"] == false);
}

TEST_CASE("numeric trend check for non power-law schedules") {
  auto inv_log = [](double n) { return 1.0 / std::log(n); };
  auto power = [](double n) { return std::pow(n, -0.2); };
  const auto rep = trend_check(inv_log, power, 1);
  REQUIRE(rep.conditions.size() == 3);
  CHECK(rep.conditions[0].satisfied);
  CHECK_FALSE(rep.conditions[1].satisfied);
  CHECK(rep.conditions[1].name == "A8.log");
  CHECK(rep.conditions[2].satisfied);
  for (const auto& c : rep.conditions) CHECK(c.heuristic);

  const auto powers = trend_check(power, power, 1);
  CHECK(powers.all_satisfied());
  const auto wide = trend_check([](double n) { return std::pow(n, -0.5); }, power, 1);
  CHECK_FALSE(wide.conditions[0].satisfied);
}

TEST_CASE("schedules") {
  const PowerSchedule s{0.5, 0.2};
  CHECK(s.value(1.0) == 0.5);
  CHECK(s.value(32.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS((PowerSchedule{0.0, 0.2}.validate()), ConfigError);
  CHECK_THROWS_AS((PowerSchedule{1.0, NAN}.validate()), ConfigError);
}

TEST_CASE("number parsing") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("1/3") == 1.0 / 3.0);
  CHECK(parse_number("-2") == -2.0);
  CHECK_THROWS_AS(parse_number(""), ConfigError);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("1/2/3"), ConfigError);
}
