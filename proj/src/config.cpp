#include "resdens/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "resdens/error.hpp"

namespace resdens {

namespace {

using RawConfig = std::map<std::string, std::vector<std::string>>;

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  std::string body = trim(s);
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    auto item = trim(std::string_view(body).substr(start, comma - start));
    if (item.size() >= 2 && item.front() == '"' && item.back() == '"') {
      item = item.substr(1, item.size() - 2);
    }
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RawConfig parse_flat(std::istream& in) {
  RawConfig raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (raw.count(key)) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                        "'");
    }
    raw[key] = split_list(std::string_view(body).substr(eq + 1));
  }
  return raw;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("config values must be strings, numbers or arrays of them");
}

RawConfig parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  RawConfig raw;
  for (const auto& [key, value] : j.items()) {
    auto& list = raw[key];
    if (value.is_array()) {
      for (const auto& item : value) list.push_back(scalar_text(item));
    } else {
      list.push_back(scalar_text(value));
    }
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  const std::vector<std::string>* take(std::initializer_list<const char*> keys) {
    const std::vector<std::string>* found = nullptr;
    std::string found_key;
    for (const char* k : keys) {
      const auto it = raw_.find(k);
      if (it == raw_.end()) continue;
      if (found) throw ConfigError("keys '" + found_key + "' and '" + k + "' conflict");
      found = &it->second;
      found_key = k;
      used_.push_back(k);
    }
    return found;
  }

  std::string text(std::initializer_list<const char*> keys, const std::string& fallback) {
    const auto* v = take(keys);
    if (!v) return fallback;
    if (v->size() != 1) throw ConfigError(std::string("'") + *keys.begin() + "' takes one value");
    return (*v)[0];
  }

  std::optional<double> number(std::initializer_list<const char*> keys) {
    const auto* v = take(keys);
    if (!v) return std::nullopt;
    if (v->size() != 1) throw ConfigError(std::string("'") + *keys.begin() + "' takes one value");
    return parse_number((*v)[0]);
  }

  std::optional<std::vector<double>> numbers(std::initializer_list<const char*> keys) {
    const auto* v = take(keys);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const auto& s : *v) out.push_back(parse_number(s));
    return out;
  }

  void check_unused() const {
    for (const auto& [key, _] : raw_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }

 private:
  RawConfig raw_;
  std::vector<std::string> used_;
};

std::uint64_t to_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError(std::string(what) + " must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<double> per_axis(const std::optional<std::vector<double>>& v,
                             const std::vector<double>& fallback, int d, const char* what) {
  if (!v) {
    if (fallback.size() == static_cast<std::size_t>(d)) return fallback;
    return std::vector<double>(static_cast<std::size_t>(d), fallback.at(0));
  }
  if (v->size() == 1) return std::vector<double>(static_cast<std::size_t>(d), (*v)[0]);
  if (v->size() != static_cast<std::size_t>(d)) {
    throw ConfigError(std::string(what) + " needs 1 or d values");
  }
  return *v;
}

ExperimentConfig build(Reader& r) {
  ExperimentConfig cfg;
  cfg.target = parse_target(r.text({"target"}, "prop1_beta"));

  auto& dgp = cfg.dgp;
  if (auto d = r.number({"d", "dim"})) {
    dgp.dim = static_cast<int>(to_count(*d, "d"));
    if (dgp.dim < 1) throw ConfigError("d must be at least 1");
  }
  dgp.m = parse_regression_fn(r.text({"m"}, to_string(dgp.m)));
  if (auto v = r.number({"m_intercept"})) dgp.m_intercept = *v;
  if (auto v = r.number({"m_slope"})) dgp.m_slope = *v;
  dgp.g = parse_covariate_law(r.text({"g"}, to_string(dgp.g)));
  if (auto v = r.number({"g_mean"})) dgp.g_mean = *v;
  if (auto v = r.number({"g_sd"})) dgp.g_sd = *v;
  dgp.f = parse_error_law(r.text({"f"}, to_string(dgp.f)));
  if (auto v = r.number({"sigma"})) dgp.sigma = *v;
  dgp.support_lo = per_axis(r.numbers({"support_lo"}), dgp.support_lo, dgp.dim, "support_lo");
  dgp.support_hi = per_axis(r.numbers({"support_hi"}), dgp.support_hi, dgp.dim, "support_hi");
  dgp.trim_lo = per_axis(r.numbers({"trim_lo"}), dgp.trim_lo, dgp.dim, "trim_lo");
  dgp.trim_hi = per_axis(r.numbers({"trim_hi"}), dgp.trim_hi, dgp.dim, "trim_hi");
  cfg.design = parse_design(r.text({"design"}, to_string(cfg.design)));

  if (auto v = r.numbers({"n", "n_grid"})) {
    cfg.n_grid.clear();
    for (double n : *v) cfg.n_grid.push_back(static_cast<std::size_t>(to_count(n, "n")));
  }
  if (auto v = r.numbers({"b0", "b0_grid"})) cfg.b0_grid = *v;
  if (auto v = r.numbers({"b1", "b1_grid"})) cfg.b1_grid = *v;

  const auto b0c = r.number({"b0_c"});
  const auto b0a = r.number({"b0_a"});
  if (b0c || b0a) cfg.b0_schedule = PowerSchedule{b0c.value_or(1.0), b0a.value_or(0.2)};
  const auto b1c = r.number({"b1_c"});
  const auto b1g = r.number({"b1_gamma"});
  if (b1c || b1g) cfg.b1_schedule = PowerSchedule{b1c.value_or(1.0), b1g.value_or(0.2)};

  if (r.has("vary")) {
    cfg.vary = parse_scale_var(r.text({"vary"}, "b0"));
  } else if (cfg.b0_grid.size() > 1) {
    cfg.vary = ScaleVar::b0;
  } else if (cfg.b1_grid.size() > 1) {
    cfg.vary = ScaleVar::b1;
  } else if (cfg.n_grid.size() > 1) {
    cfg.vary = ScaleVar::n;
  }

  if (auto v = r.number({"e"})) cfg.e = *v;
  if (auto v = r.number({"replications", "R"})) cfg.replications = to_count(*v, "replications");
  if (auto v = r.number({"seed"})) cfg.seed = to_count(*v, "seed");
  if (r.has("mode")) cfg.mode = parse_mode(r.text({"mode"}, "slope"));
  cfg.claimed = r.number({"claimed"});
  cfg.band = r.number({"band"});
  if (auto v = r.number({"workers"})) cfg.workers = static_cast<int>(to_count(*v, "workers"));
  cfg.kernel = r.text({"kernel"}, cfg.kernel);
  if (r.has("quad_rule")) cfg.quad.rule = parse_quadrature_rule(r.text({"quad_rule"}, ""));
  if (auto v = r.number({"quad_abs_tol"})) cfg.quad.abs_tol = *v;
  if (auto v = r.number({"quad_rel_tol"})) cfg.quad.rel_tol = *v;
  if (auto v = r.number({"x_grid_points"})) {
    cfg.x_grid_points = to_count(*v, "x_grid_points");
    if (cfg.x_grid_points < 1) throw ConfigError("x_grid_points must be >= 1");
  }
  r.check_unused();
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  RawConfig raw;
  if (first != std::string::npos && text[first] == '{') {
    raw = parse_json(text);
  } else {
    std::istringstream lines(text);
    raw = parse_flat(lines);
  }
  Reader reader(std::move(raw));
  auto cfg = build(reader);
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_experiment_config(in);
}

}  // namespace resdens
