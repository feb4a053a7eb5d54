#include <random>
#include <vector>

#include "doctest.h"
#include "resdens/summation.hpp"

using resdens::NeumaierSum;
using resdens::compensated_sum;

TEST_CASE("compensated sum recovers small terms lost by naive summation") {
  std::vector<double> v{1.0, 1e100, 1.0, -1e100};
  double naive = 0.0;
  for (double x : v) naive += x;
  CHECK(naive == 0.0);
  CHECK(compensated_sum(v) == 2.0);
}

TEST_CASE("many tiny increments on a large base") {
  NeumaierSum s(1.0);
  for (int k = 0; k < 1000000; ++k) s += 1e-16;
  CHECK(s.value() == doctest::Approx(1.0 + 1e-10).epsilon(1e-15));
}

TEST_CASE("adding zeros leaves the sum bit-identical") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  NeumaierSum a, b;
  for (int k = 0; k < 1000; ++k) {
    const double x = z(gen);
    a += x;
    b += x;
    b += 0.0;
  }
  CHECK(a.value() == b.value());
}

TEST_CASE("empty sum is zero") {
  CHECK(compensated_sum(std::vector<double>{}) == 0.0);
}
