#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "resdens/error.hpp"
#include "resdens/kernel.hpp"
#include "resdens/montecarlo.hpp"

using namespace resdens;

namespace {

double std_normal(double e) {
  return std::exp(-0.5 * e * e) / std::sqrt(2.0 * std::numbers::pi);
}

double slope_over_b1(int order, bool squared, double p, double e,
                     const std::vector<double>& b1s) {
  const auto k = UnivariateKernel::quadweight();
  QuadratureSpec quad;
  quad.abs_tol = 1e-14;
  quad.rel_tol = 1e-12;
  std::vector<double> ys;
  for (double b : b1s) {
    ys.push_back(std::abs(lemma4_integral(k, order, squared, p, std_normal, e, b, quad)));
  }
  return fit_rate(b1s, ys).slope;
}

}  // namespace

TEST_CASE("quadweight values at exact rational points") {
  const auto k = UnivariateKernel::quadweight();
  CHECK(k.eval(0, 1.0) == 0.0);
  CHECK(k.eval(1, 0.0) == 0.0);
  CHECK(k.eval(0, 0.5) == 25515.0 / 65536.0);
  CHECK(k.eval(1, 0.5) == -2.076416015625);
  CHECK(k.eval(0, 0.0) == 1.23046875);
  CHECK(k.value(0.5) == k.eval(0, 0.5));
}

TEST_CASE("orders outside 0..3 are rejected") {
  const auto k = UnivariateKernel::quadweight();
  CHECK_THROWS_AS(k.eval(4, 0.0), InvalidOrder);
  CHECK_THROWS_AS(k.eval(-1, 0.0), InvalidOrder);
}

TEST_CASE("support and symmetry of every derivative") {
  for (const auto& k : {UnivariateKernel::quadweight(), UnivariateKernel::triweight()}) {
    for (int order = 0; order <= 3; ++order) {
      for (double v : {1.0, 1.0000001, 1.5, 10.0}) {
        CHECK(k.eval(order, v) == 0.0);
        CHECK(k.eval(order, -v) == 0.0);
      }
      for (double v = 0.0; v < 1.0; v += 0.0625) {
        const double sign = order % 2 == 0 ? 1.0 : -1.0;
        CHECK(k.eval(order, -v) == sign * k.eval(order, v));
      }
    }
  }
}

TEST_CASE("centred differences approximate the next derivative") {
  // K1 is C^3 only: the fourth derivative jumps at +-1, so a stencil that
  // straddles an edge is first-order accurate and is bounded separately.
  const auto k = UnivariateKernel::quadweight();
  const double h = 1e-4;
  const double k4_jump = 384.0 * 315.0 / 256.0;
  for (int order = 0; order <= 2; ++order) {
    double smooth = 0.0, straddle = 0.0;
    for (int j = 0; j <= 2400; ++j) {
      const double v = -1.2 + 1e-3 * j;
      const double fd = (k.eval(order, v + h) - k.eval(order, v - h)) / (2.0 * h);
      const double err = std::abs(fd - k.eval(order + 1, v));
      double& slot = std::abs(std::abs(v) - 1.0) < h ? straddle : smooth;
      slot = std::max(slot, err);
    }
    CHECK(smooth <= 1e-5);
    CHECK(straddle <= h * k4_jump);
  }
}

TEST_CASE("triweight third derivative jumps by -48c at the support edge") {
  const auto k = UnivariateKernel::triweight();
  const double c = 35.0 / 32.0;
  CHECK(k.eval(3, 1.0 - 1e-9) == doctest::Approx(-48.0 * c).epsilon(1e-6));
  CHECK(k.eval(3, 1.0 + 1e-9) == 0.0);
}

TEST_CASE("kernel names") {
  CHECK(UnivariateKernel::by_name("quadweight").name() == "quadweight");
  CHECK(UnivariateKernel::by_name("triweight").power() == 3);
  CHECK_THROWS_AS(UnivariateKernel::by_name("foo"), UnknownKernel);
}

TEST_CASE("product kernel values") {
  const auto q = UnivariateKernel::quadweight();
  const ProductKernel k1d(q, 1), k2d(q, 2);
  const double out[] = {0.6};
  const double zero1[] = {0.0};
  const double zero2[] = {0.0, 0.0};
  CHECK(k1d.eval(out) == 0.0);
  CHECK(k1d.eval(zero1) == 2.4609375);
  CHECK(k2d.eval(zero2) == 6.05621337890625);
  const double z02[] = {0.2};
  CHECK(k1d.eval(z02) == doctest::Approx(2.0 * (315.0 / 256.0) * std::pow(0.84, 4)));
  CHECK_THROWS_AS(k2d.eval(zero1), DimensionError);
}

TEST_CASE("product kernel is exactly the product of rescaled factors") {
  const auto q = UnivariateKernel::quadweight();
  const ProductKernel k(q, 3);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int s = 0; s < 500; ++s) {
    const double z[] = {u(gen), u(gen), u(gen)};
    const double prod = 2.0 * q.eval(0, 2.0 * z[0]) * 2.0 * q.eval(0, 2.0 * z[1]) * 2.0 *
                        q.eval(0, 2.0 * z[2]);
    CHECK(std::abs(k.eval(z) - prod) == 0.0);
    const double mz[] = {-z[0], -z[1], -z[2]};
    CHECK(k.eval(z) == k.eval(mz));
    if (std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2])}) > 0.5) {
      CHECK(k.eval(z) == 0.0);
    }
  }
}

TEST_CASE("quadweight pair passes every kernel condition") {
  const auto q = UnivariateKernel::quadweight();
  QuadratureSpec quad;
  for (int d : {1, 2}) {
    const auto report = validate_kernel_conditions(ProductKernel(q, d), q, quad);
    CHECK(report.all_pass());
    for (const auto& c : report.checks) CHECK(c.pass == (c.deviation <= c.tolerance));
  }
  const auto report = validate_kernel_conditions(ProductKernel(q, 1), q, quad);
  for (const auto& c : report.checks) {
    if (c.id == "K1.mass") CHECK(c.deviation <= 1e-12);
  }
  CHECK(report.to_text().find("K1.d3.continuity") != std::string::npos);
}

TEST_CASE("triweight fails only the third-derivative continuity scan") {
  const auto t = UnivariateKernel::triweight();
  const auto report = validate_kernel_conditions(ProductKernel(t, 1), t, QuadratureSpec{});
  CHECK_FALSE(report.all_pass());
  const auto failures = report.failures();
  REQUIRE(failures.size() == 1);
  CHECK(failures[0]->id == "K1.d3.continuity");
}

TEST_CASE("grid jump scan") {
  const auto q = UnivariateKernel::quadweight();
  const auto t = UnivariateKernel::triweight();
  CHECK(max_grid_jump(q, 3, 1e-5) < 1e-2);
  CHECK(max_grid_jump(t, 3, 1e-5) > 50.0);
}

TEST_CASE("h_p powers") {
  const double e = -1.5;
  CHECK(h_p(std_normal, 0.0, e) == std_normal(e));
  CHECK(h_p(std_normal, 1.0, e) == e * std_normal(e));
  CHECK(h_p(std_normal, 2.0, e) == doctest::Approx(e * e * std_normal(e)));
  CHECK(h_p(std_normal, 0.5, e) == doctest::Approx(std::sqrt(1.5) * std_normal(e)));
}

TEST_CASE("moment integrals") {
  const auto q = UnivariateKernel::quadweight();
  QuadratureSpec quad;
  for (double b1 : {0.4, 0.1, 0.05}) {
    CHECK(std::abs(lemma4_integral(q, 1, false, 0.0, std_normal, 0.0, b1, quad)) <= 1e-9);
  }
  CHECK_THROWS_AS(lemma4_integral(q, 1, false, 0.0, std_normal, 0.0, 0.0, quad),
                  InvalidBandwidth);
  CHECK_THROWS_AS(lemma4_integral(q, 0, false, 0.0, std_normal, 0.0, 0.1, quad),
                  InvalidOrder);

  const std::vector<double> b1s{0.4, 0.2, 0.1, 0.05};
  const double s1 = slope_over_b1(1, true, 0.0, 0.0, b1s);
  CHECK(s1 >= 0.9);
  CHECK(s1 <= 1.1);
  const double s2 = slope_over_b1(2, false, 0.0, 0.3, b1s);
  CHECK(s2 >= 2.8);
  CHECK(s2 <= 3.2);
}

TEST_CASE("moment integral against a direct Riemann sum") {
  const auto q = UnivariateKernel::quadweight();
  const double e = 0.7, b1 = 0.2;
  const double v = lemma4_integral(q, 2, true, 1.0, std_normal, e, b1, QuadratureSpec{});
  double riemann = 0.0;
  const int m = 200000;
  const double step = 2.0 * b1 / m;
  for (int k = 0; k < m; ++k) {
    const double eps = e - b1 + (k + 0.5) * step;
    const double kk = q.eval(2, (eps - e) / b1);
    riemann += kk * kk * eps * std_normal(eps) * step;
  }
  CHECK(v == doctest::Approx(riemann).epsilon(1e-8));
}
