#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "resdens/dataset.hpp"
#include "resdens/dgp.hpp"
#include "resdens/error.hpp"

using namespace resdens;

TEST_CASE("dataset invariants") {
  CHECK_NOTHROW(Dataset(1, {0.0, 1.0}, {1.0, 2.0}));
  CHECK_THROWS_AS(Dataset(1, {0.0}, {1.0}), DataError);
  CHECK_THROWS_AS(Dataset(1, {0.0, 1.0}, {1.0}), DataError);
  CHECK_THROWS_AS(Dataset(2, {0.0, 1.0, 2.0}, {1.0, 2.0}), DataError);
  CHECK_THROWS_AS(Dataset(0, {}, {1.0, 2.0}), DataError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(1, {0.0, nan}, {1.0, 2.0}), DataError);
  CHECK_THROWS_AS(Dataset(1, {0.0, 1.0}, {1.0, INFINITY}), DataError);
  CHECK_THROWS_AS(Dataset(1, {0.0, 1.0}, {1.0, 2.0}, std::vector<double>{1.0, 1.0},
                          std::vector<double>{0.0, 0.5}),
                  DataError);
  const Dataset ok(1, {0.0, 1.0}, {1.0, 2.0}, std::vector<double>{0.5, 1.5},
                   std::vector<double>{0.5, 0.5});
  CHECK(ok.has_truth());
  const Dataset plain(1, {0.0, 1.0}, {1.0, 2.0});
  CHECK_FALSE(plain.has_truth());
  CHECK_THROWS_AS(plain.true_m(), DataError);
}

TEST_CASE("with_errors keeps Y = m + eps") {
  const auto data = generate_sample(DGPSpec::default_acceptance(), 50, 3);
  std::vector<double> eps(50, 0.125);
  const auto other = data.with_errors(eps);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(other.y(i) == data.true_m()[i] + 0.125);
    CHECK(other.y(i) - other.true_m()[i] == other.true_eps()[i]);
  }
}

TEST_CASE("CSV round trip is exact") {
  const auto data = generate_sample(DGPSpec::default_acceptance(), 40, 9);
  std::stringstream buf;
  write_dataset_csv(buf, data);
  const auto back = read_dataset_csv(buf);
  REQUIRE(back.size() == data.size());
  CHECK(back.has_truth());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.x(i)[0] == data.x(i)[0]);
    CHECK(back.y(i) == data.y(i));
    CHECK(back.true_eps()[i] == data.true_eps()[i]);
  }
}

TEST_CASE("CSV parsing errors carry the line number") {
  std::istringstream nan_row("x1,y\n0.1,1\n0.2,nan\n0.3,2\n");
  try {
    read_dataset_csv(nan_row);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream junk("x1,y\n0.1,1\n0.2,abc\n");
  CHECK_THROWS_AS(read_dataset_csv(junk), DataError);
  std::istringstream short_row("x1,x2,y\n0.1,0.2,1\n0.3,2\n");
  CHECK_THROWS_AS(read_dataset_csv(short_row), DataError);
  std::istringstream bad_header("a,b\n0.1,1\n0.2,2\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_header), DataError);
}

TEST_CASE("CSV accepts a BOM and two covariates") {
  std::istringstream in("\xEF\xBB\xBFx1,x2,y\n0.1,0.2,1\n0.3,0.4,2\n");
  const auto data = read_dataset_csv(in);
  CHECK(data.dim() == 2);
  CHECK(data.x(1)[1] == 0.4);
}

TEST_CASE("trim region") {
  const TrimRegion t({0.1}, {0.9});
  const double inside[] = {0.5}, edge[] = {0.1}, outside[] = {0.95};
  CHECK(t.contains(inside));
  CHECK(t.contains(edge));
  CHECK_FALSE(t.contains(outside));
  const double lo[] = {0.0}, hi[] = {1.0};
  CHECK(t.strictly_inside(lo, hi));
  const double hi_tight[] = {0.9};
  CHECK_FALSE(t.strictly_inside(lo, hi_tight));
  CHECK_THROWS(TrimRegion({0.5}, {0.5}));
  CHECK_THROWS(TrimRegion({0.1, 0.1}, {0.9}));
}
