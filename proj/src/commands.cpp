#include "resdens/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <omp.h>

#include "resdens/bandwidth.hpp"
#include "resdens/config.hpp"
#include "resdens/decomposition.hpp"
#include "resdens/density.hpp"
#include "resdens/error.hpp"
#include "resdens/kernel.hpp"
#include "resdens/montecarlo.hpp"
#include "resdens/smoother.hpp"

namespace resdens {

void set_workers(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

namespace {

CommandResult failure(int code, const std::string& message) {
  return {code, "error: " + message + "\n", {}};
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t d, const char* what) {
  if (v.size() == d) return v;
  if (v.size() == 1) return std::vector<double>(d, v[0]);
  throw ConfigError(std::string(what) + " needs 1 or d values");
}

}  // namespace

CommandResult run_guarded(const std::function<CommandResult()>& command) {
  try {
    return command();
  } catch (const AllTrimmed& e) {
    return failure(1, e.what());
  } catch (const DataError& e) {
    return failure(2, e.what());
  } catch (const ConfigError& e) {
    return failure(2, e.what());
  } catch (const UnknownKernel& e) {
    return failure(2, e.what());
  } catch (const InvalidBandwidth& e) {
    return failure(2, e.what());
  } catch (const DimensionError& e) {
    return failure(2, e.what());
  } catch (const GridError& e) {
    return failure(2, e.what());
  } catch (const DegenerateExperiment& e) {
    return failure(3, e.what());
  } catch (const std::exception& e) {
    return failure(3, e.what());
  }
}

CommandResult cmd_estimate(const EstimateOptions& opt) {
  const Dataset data = read_dataset_csv_file(opt.input);
  const std::size_t d = data.dim();
  std::vector<double> lo, hi;
  if (opt.trim_lo.empty() || opt.trim_hi.empty()) {
    lo.assign(d, INFINITY);
    hi.assign(d, -INFINITY);
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], data.x(i)[a]);
        hi[a] = std::max(hi[a], data.x(i)[a]);
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      if (!(lo[a] < hi[a])) hi[a] = lo[a] + 1.0;
    }
  }
  if (!opt.trim_lo.empty()) lo = broadcast(opt.trim_lo, d, "--trim-lo");
  if (!opt.trim_hi.empty()) hi = broadcast(opt.trim_hi, d, "--trim-hi");
  const TrimRegion trim(lo, hi);

  const auto k1 = UnivariateKernel::by_name(opt.kernel);
  const ProductKernel k0(k1, static_cast<int>(d));
  check_bandwidth(opt.b0, "b0");
  check_bandwidth(opt.b1, "b1");
  const auto fit = fit_residuals(data, k0, opt.b0, trim);

  DensityCurve curve;
  if (opt.grid_lo || opt.grid_hi) {
    const auto kept = fit.kept_residuals();
    const auto dflt = default_grid(kept, opt.b1, k1.support_radius(), 2);
    const double glo = opt.grid_lo.value_or(dflt.front());
    const double ghi = opt.grid_hi.value_or(dflt.back());
    if (!(glo < ghi) || opt.grid_points < 2) throw GridError("invalid evaluation grid");
    std::vector<double> grid(opt.grid_points);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid[k] = glo + (ghi - glo) * static_cast<double>(k) /
                          static_cast<double>(grid.size() - 1);
    }
    grid.back() = ghi;
    curve = fhat(fit, k1, opt.b1, grid);
  } else {
    const auto grid = default_grid(fit.kept_residuals(), opt.b1, k1.support_radius(),
                                   opt.grid_points);
    curve = fhat(fit, k1, opt.b1, grid);
  }

  CommandResult res;
  std::ostringstream out;
  out << std::setprecision(6);
  out << "n = " << data.size() << ", kept = " << fit.n_kept()
      << ", undefined NW points = " << fit.n_undefined() << '\n';
  out << "b0 = " << opt.b0 << ", b1 = " << opt.b1 << ", kernel " << k1.name() << '\n';
  out << "integral of f_hat on grid = " << curve.trapezoid_mass() << '\n';
  if (!opt.output.empty()) {
    auto file = open_output(opt.output);
    write_density_csv(file, curve);
    res.artifacts.push_back(opt.output);
    out << "wrote " << opt.output << '\n';
  } else {
    std::ostringstream csv;
    write_density_csv(csv, curve);
    out << csv.str();
  }
  res.summary = out.str();
  return res;
}

CommandResult cmd_kernel_check(const std::string& kernel, double tolerance) {
  const auto k1 = UnivariateKernel::by_name(kernel);
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  QuadratureSpec quad;
  quad.abs_tol = tolerance;
  quad.rel_tol = tolerance;
  const auto report = validate_kernel_conditions(ProductKernel(k1, 1), k1, quad);
  CommandResult res;
  res.summary = "kernel " + k1.name() + "\n" + report.to_text();
  if (report.all_pass()) {
    res.summary += "all conditions pass\n";
  } else {
    res.exit_code = 1;
    std::string names;
    for (const auto& c : report.failures()) names += (names.empty() ? "" : ", ") + c->id;
    res.summary += "FAIL: " + names + "\n";
  }
  return res;
}

CommandResult cmd_rates(const RatesOptions& opt) {
  ExperimentConfig cfg = read_experiment_config(opt.config);
  set_workers(opt.workers > 0 ? opt.workers : cfg.workers);
  const auto report = run_rate_experiment(cfg);

  CommandResult res;
  const std::filesystem::path dir(opt.out_dir.empty() ? "." : opt.out_dir);
  const std::string stem = "rates_" + to_string(cfg.target);
  const auto json_path = (dir / (stem + ".json")).string();
  const auto csv_path = (dir / (stem + ".csv")).string();
  {
    auto f = open_output(json_path);
    f << report.to_json() << '\n';
  }
  {
    auto f = open_output(csv_path);
    report.write_csv(f);
  }
  res.artifacts = {json_path, csv_path};
  res.summary = report.summary() + "wrote " + json_path + " and " + csv_path + "\n";
  if (!report.pass) {
    res.exit_code = 1;
    res.summary += "FAIL: " + to_string(cfg.target) + " outside its band\n";
  }
  return res;
}

CommandResult cmd_validate_bandwidths(int d, double a, double gamma, double c0, double c1,
                                      bool json) {
  if (d < 1) return failure(2, "dimension d must be at least 1");
  const auto report = validate_bandwidths(PowerSchedule{c0, a}, PowerSchedule{c1, gamma}, d);
  CommandResult res;
  res.summary = json ? report.to_json() + "\n" : report.to_text();
  if (!report.all_satisfied()) {
    res.exit_code = 1;
    std::string names;
    for (const auto& n : report.failures()) names += (names.empty() ? "" : ", ") + n;
    res.summary += "FAIL: " + names + " not satisfied\n";
  }
  return res;
}

namespace {

Dataset simulate(const SimulateOptions& opt) {
  opt.dgp.validate();
  if (opt.design == DesignKind::random) {
    return generate_sample(opt.dgp, opt.n, opt.seed, opt.replication);
  }
  const auto x = make_design(opt.dgp, opt.n, opt.design, opt.seed);
  return sample_given_design(opt.dgp, x, opt.seed, opt.replication);
}

}  // namespace

CommandResult cmd_simulate(const SimulateOptions& opt) {
  const Dataset data = simulate(opt);
  CommandResult res;
  if (opt.output.empty()) {
    std::ostringstream csv;
    write_dataset_csv(csv, data);
    res.summary = csv.str();
  } else {
    auto f = open_output(opt.output);
    write_dataset_csv(f, data);
    res.artifacts.push_back(opt.output);
    res.summary = "wrote " + std::to_string(data.size()) + " rows to " + opt.output + "\n";
  }
  return res;
}

CommandResult cmd_diagnose(const DiagnoseOptions& opt) {
  const Dataset data = simulate(opt.sample);
  const auto& dgp = opt.sample.dgp;
  const auto k1 = UnivariateKernel::by_name(opt.kernel);
  const ProductKernel k0(k1, dgp.dim);
  const TrimRegion trim = dgp.trim_region();
  const LeaveOneOutSmoother sm(data, k0, opt.b0);
  const auto fit = fit_residuals(sm, trim);
  const auto terms = decompose(sm, trim);
  const QuadratureSpec quad;
  const auto taylor = taylor_terms(fit, data, k1, opt.b1, opt.e, quad);
  const auto aux = auxiliary_stats(sm, terms, dgp, trim, quad);
  const auto sums = prop_sums(terms, taylor, data, k1, opt.e, opt.b1);

  CommandResult res;
  std::ostringstream out;
  out << std::setprecision(6);
  out << "n = " << data.size() << ", kept = " << fit.n_kept() << ", b0 = " << opt.b0
      << ", b1 = " << opt.b1 << ", e = " << opt.e << '\n';
  out << "s_beta = " << sums.s_beta << ", s_sigma = " << sums.s_sigma
      << ", s_zeta = " << sums.s_zeta << ", s_r = " << sums.s_r << '\n';
  out << "M_n = " << aux.m_big << ", sum g_cross/g_hat = " << aux.cross_over_ghat
      << ", sum g_tilde/g_hat = " << aux.tilde_over_ghat << '\n';
  if (opt.sample.output.empty()) {
    std::ostringstream csv;
    write_diagnostics_csv(csv, terms, taylor, aux, fit);
    out << csv.str();
  } else {
    auto f = open_output(opt.sample.output);
    write_diagnostics_csv(f, terms, taylor, aux, fit);
    res.artifacts.push_back(opt.sample.output);
    out << "wrote " << opt.sample.output << '\n';
  }
  res.summary = out.str();
  return res;
}

}  // namespace resdens
