#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("resdens_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path operator/(const std::string& name) const { return dir_ / name; }
  const fs::path& path() const { return dir_; }

  Run run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(RESDENS_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

 private:
  fs::path dir_;
};

std::string config(const std::string& name) {
  return std::string(RESDENS_SOURCE_DIR) + "/configs/" + name;
}

double trapezoid_mass(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<double> e, f;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
    const auto comma = line.find(',');
    e.push_back(std::stod(line.substr(0, comma)));
    f.push_back(std::stod(line.substr(comma + 1)));
  }
  double mass = 0.0;
  for (std::size_t k = 1; k < e.size(); ++k) mass += 0.5 * (f[k] + f[k - 1]) * (e[k] - e[k - 1]);
  return mass;
}

}  // namespace

TEST_CASE("estimate") {
  Scratch s;
  const auto data = (s / "sample.csv").string();
  REQUIRE(s.run("simulate --n 500 --seed 4 --out " + data).code == 0);

  SUBCASE("valid file") {
    const auto curve = (s / "curve.csv").string();
    const auto r = s.run("estimate " + data + " --b0 0.1 --b1 0.2 --out " + curve);
    CHECK(r.code == 0);
    CHECK(r.out.find("n = 500") != std::string::npos);
    CHECK(r.out.find("undefined NW points") != std::string::npos);
    REQUIRE(fs::exists(curve));
    CHECK(std::abs(trapezoid_mass(slurp(curve)) - 1.0) <= 1e-6);
  }
  SUBCASE("non-finite value") {
    const auto bad = s.write("bad.csv", "x1,y\n0.1,0.2\nnan,0.3\n0.5,0.1\n");
    const auto r = s.run("estimate " + bad + " --b0 0.1 --b1 0.2");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("everything trimmed") {
    const auto r = s.run("estimate " + data + " --b0 0.1 --b1 0.2 --trim-lo 5 --trim-hi 6");
    CHECK(r.code == 1);
    CHECK(r.err.find("all observations trimmed") != std::string::npos);
  }
  SUBCASE("missing bandwidth is a usage error") {
    CHECK(s.run("estimate " + data + " --b1 0.2").code == 2);
    CHECK(s.run("estimate " + data + " --b0 -1 --b1 0.2").code == 2);
  }
}

TEST_CASE("kernel-check") {
  Scratch s;
  CHECK(s.run("kernel-check quadweight").code == 0);
  const auto tri = s.run("kernel-check triweight");
  CHECK(tri.code == 1);
  CHECK((tri.out + tri.err).find("K1.d3.continuity") != std::string::npos);
  CHECK(s.run("kernel-check foo").code == 2);
}

TEST_CASE("validate-bandwidths") {
  Scratch s;
  CHECK(s.run("validate-bandwidths --d 1 --a 0.2 --gamma 0.2").code == 0);
  const auto bad = s.run("validate-bandwidths --d 1 --a 0.4 --gamma 0.2");
  CHECK(bad.code == 1);
  CHECK((bad.out + bad.err).find("A8") != std::string::npos);
  CHECK(s.run("validate-bandwidths --d 0 --a 0.2 --gamma 0.2").code == 2);
  CHECK(s.run("validate-bandwidths --d 1 --a 1/3 --gamma 0.2").code == 1);
  const auto js = s.run("validate-bandwidths --d 2 --a 0.2 --gamma 0.2 --json");
  CHECK(js.code == 0);
  CHECK(nlohmann::json::parse(js.out)["d_star"] == 4);
}

TEST_CASE("rates") {
  Scratch s;
  SUBCASE("bundled config") {
    const auto r = s.run("rates " + config("rates_prop1.cfg") + " --out " + s.path().string());
    CHECK(r.code == 0);
    const auto json = s / "rates_prop1_beta.json";
    REQUIRE(fs::exists(json));
    CHECK(fs::exists(s / "rates_prop1_beta.csv"));
    const auto j = nlohmann::json::parse(slurp(json));
    CHECK(j.contains("slope"));
  }
  SUBCASE("three-point grid") {
    const auto cfg = s.write("three.cfg", "target = prop1_beta\nn = 500\nb0 = 0.1, 0.2, 0.3\n");
    const auto r = s.run("rates " + cfg + " --out " + s.path().string());
    CHECK(r.code == 2);
    CHECK(r.err.find("≥ 4 grid points required") != std::string::npos);
  }
  SUBCASE("inadmissible schedule warns and proceeds") {
    const auto cfg = s.write("wide.cfg",
                             "target = lemma1_stochastic\n"
                             "n = 200, 400, 800, 1600\n"
                             "b0_c = 0.5\nb0_a = 0.5\n"
                             "replications = 20\n");
    const auto r = s.run("rates " + cfg + " --out " + s.path().string());
    CHECK((r.code == 0 || r.code == 1));
    CHECK((r.out + r.err).find("warning: schedule violates A8") != std::string::npos);
    CHECK(fs::exists(s / "rates_lemma1_stochastic.json"));
  }
  SUBCASE("missing config") {
    CHECK(s.run("rates " + (s / "none.cfg").string()).code == 2);
  }
}

TEST_CASE("reruns produce byte-identical artifacts") {
  Scratch s;
  const auto a = (s / "a").string(), b = (s / "b").string();
  fs::create_directories(a);
  fs::create_directories(b);
  REQUIRE(s.run("rates " + config("prop3_zeta.cfg") + " --out " + a + " --workers 1").code <= 1);
  REQUIRE(s.run("rates " + config("prop3_zeta.cfg") + " --out " + b + " --workers 3").code <= 1);
  CHECK(slurp(fs::path(a) / "rates_prop3_zeta.json") == slurp(fs::path(b) / "rates_prop3_zeta.json"));
  CHECK(slurp(fs::path(a) / "rates_prop3_zeta.csv") == slurp(fs::path(b) / "rates_prop3_zeta.csv"));

  const auto x = (s / "x.csv").string(), y = (s / "y.csv").string();
  CHECK(s.run("simulate --n 300 --seed 9 --out " + x).code == 0);
  CHECK(s.run("simulate --n 300 --seed 9 --out " + y).code == 0);
  CHECK(slurp(x) == slurp(y));
  const auto cx = (s / "cx.csv").string(), cy = (s / "cy.csv").string();
  CHECK(s.run("estimate " + x + " --b0 0.1 --b1 0.2 --out " + cx).code == 0);
  CHECK(s.run("estimate " + x + " --b0 0.1 --b1 0.2 --out " + cy + " --workers 2").code == 0);
  CHECK(slurp(cx) == slurp(cy));
}

TEST_CASE("diagnose") {
  Scratch s;
  const auto out = (s / "diag.csv").string();
  const auto r = s.run("diagnose --n 200 --seed 2 --b0 0.1 --b1 0.2 --out " + out);
  CHECK(r.code == 0);
  const auto text = slurp(out);
  CHECK(text.rfind("i,beta,sigma,zeta,r,g_hat,g_tilde,trimmed\n", 0) == 0);
}

TEST_CASE("usage") {
  Scratch s;
  CHECK(s.run("--help").code == 0);
  CHECK(s.run("no-such-command").code == 2);
  CHECK(s.run("").code == 2);
}
