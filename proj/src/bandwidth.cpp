#include "resdens/bandwidth.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "resdens/error.hpp"

namespace resdens {

void PowerSchedule::validate() const {
  if (!std::isfinite(c) || !(c > 0.0)) throw ConfigError("schedule constant c must be > 0");
  if (!std::isfinite(a)) throw ConfigError("schedule exponent must be finite");
}

double PowerSchedule::value(double n) const { return c * std::pow(n, -a); }

int d_star(int d) {
  if (d < 1) throw DimensionError("dimension must be at least 1");
  return std::max(d + 2, 2 * d);
}

bool AssumptionReport::all_satisfied() const {
  for (const auto& c : conditions) {
    if (!c.satisfied) return false;
  }
  return true;
}

std::vector<std::string> AssumptionReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : conditions) {
    if (!c.satisfied) out.push_back(c.name);
  }
  return out;
}

std::string AssumptionReport::to_text() const {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "d = " << d << ", d* = " << d_star << '\n';
  for (const auto& c : conditions) {
    out << "  " << (c.satisfied ? "ok  " : "FAIL") << "  " << c.name << ": " << c.inequality
        << "  (margin " << c.margin << (c.heuristic ? ", heuristic" : "") << ")\n";
  }
  return out.str();
}

std::string AssumptionReport::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["d_star"] = d_star;
  j["all_satisfied"] = all_satisfied();
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : conditions) {
    j["conditions"].push_back({{"name", c.name},
                               {"satisfied", c.satisfied},
                               {"inequality", c.inequality},
                               {"margin", c.margin},
                               {"heuristic", c.heuristic}});
  }
  return j.dump(2);
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

}  // namespace

AssumptionReport validate_a8(const PowerSchedule& b0, int d) {
  b0.validate();
  AssumptionReport rep;
  rep.d = d;
  rep.d_star = d_star(d);
  const double threshold = 1.0 / rep.d_star;
  ConditionCheck rate;
  rate.name = "A8";
  rate.satisfied = b0.a > 0.0 && b0.a < threshold;
  rate.inequality = "0 < a < 1/d* : a = " + fmt(b0.a) + ", 1/d* = " + fmt(threshold) +
                    " (n b0^d*/ln n -> inf, b0 -> 0)";
  rate.margin = std::min(b0.a, threshold - b0.a);
  rep.conditions.push_back(rate);

  ConditionCheck logs;
  logs.name = "A8.log";
  logs.satisfied = b0.a > 0.0;
  logs.inequality = "a > 0 : ln(1/b0)/ln(ln n) -> inf";
  logs.margin = b0.a;
  rep.conditions.push_back(logs);
  return rep;
}

AssumptionReport validate_a9(const PowerSchedule& b1, int d) {
  b1.validate();
  AssumptionReport rep;
  rep.d = d;
  rep.d_star = d_star(d);
  const double threshold = static_cast<double>(d + 8) / (7.0 * (d + 4));
  ConditionCheck c;
  c.name = "A9";
  c.satisfied = b1.a > 0.0 && b1.a < threshold;
  c.inequality = "0 < gamma < (d+8)/(7(d+4)) : gamma = " + fmt(b1.a) +
                 ", threshold = " + fmt(threshold) + " (n^(d+8) b1^(7(d+4)) -> inf)";
  c.margin = std::min(b1.a, threshold - b1.a);
  rep.conditions.push_back(c);
  return rep;
}

AssumptionReport validate_bandwidths(const PowerSchedule& b0, const PowerSchedule& b1,
                                     int d) {
  auto rep = validate_a8(b0, d);
  const auto a9 = validate_a9(b1, d);
  rep.conditions.insert(rep.conditions.end(), a9.conditions.begin(), a9.conditions.end());
  return rep;
}

namespace {

ConditionCheck trend(const std::string& name, const std::string& text,
                     const std::function<double(double)>& log_expr) {
  static constexpr double kNs[] = {1e3, 1e4, 1e5, 1e6};
  ConditionCheck c;
  c.name = name;
  c.inequality = text + " increasing over n = 1e3..1e6";
  c.heuristic = true;
  c.satisfied = true;
  double min_step = INFINITY;
  double prev = log_expr(kNs[0]);
  for (std::size_t k = 1; k < std::size(kNs); ++k) {
    const double cur = log_expr(kNs[k]);
    const double step = cur - prev;
    // Growth below rounding noise counts as flat.
    const double noise = 1e-9 * std::max(1.0, std::abs(prev));
    if (!std::isfinite(step) || !(step > noise)) c.satisfied = false;
    min_step = std::min(min_step, std::isfinite(step) ? step : -INFINITY);
    prev = cur;
  }
  c.margin = min_step;
  return c;
}

}  // namespace

AssumptionReport trend_check(const Schedule& b0, const Schedule& b1, int d) {
  AssumptionReport rep;
  rep.d = d;
  rep.d_star = d_star(d);
  const int ds = rep.d_star;
  rep.conditions.push_back(trend("A8", "ln(n b0^d*/ln n)", [&](double n) {
    return std::log(n) + ds * std::log(b0(n)) - std::log(std::log(n));
  }));
  rep.conditions.push_back(trend("A8.log", "ln(1/b0)/ln(ln n)", [&](double n) {
    return -std::log(b0(n)) / std::log(std::log(n));
  }));
  rep.conditions.push_back(trend("A9", "ln(n^(d+8) b1^(7(d+4)))", [&](double n) {
    return (d + 8) * std::log(n) + 7.0 * (d + 4) * std::log(b1(n));
  }));
  return rep;
}

namespace {

double parse_plain(std::string_view text, std::string_view whole) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("cannot parse number '" + std::string(whole) + "'");
  }
  return v;
}

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_number(std::string_view text) {
  const auto t = trim_ws(text);
  const auto slash = t.find('/');
  if (slash == std::string_view::npos) return parse_plain(t, text);
  const double num = parse_plain(trim_ws(t.substr(0, slash)), text);
  const double den = parse_plain(trim_ws(t.substr(slash + 1)), text);
  if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

}  // namespace resdens
