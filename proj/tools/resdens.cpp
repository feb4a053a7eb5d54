// Command-line front end: density estimation from CSV, kernel checks,
// bandwidth validation, simulation and rate experiments.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resdens/bandwidth.hpp"
#include "resdens/commands.hpp"
#include "resdens/error.hpp"

namespace {

struct DgpFlags {
  int d = 1;
  std::string m = "quadratic";
  std::string g = "uniform";
  std::string f = "normal";
  double sigma = 0.5;
  std::vector<double> support_lo{0.0};
  std::vector<double> support_hi{1.0};
  std::vector<double> trim_lo{0.1};
  std::vector<double> trim_hi{0.9};
  std::string design = "random";
};

void add_sample_flags(CLI::App* cmd, DgpFlags& flags, resdens::SimulateOptions& opt) {
  cmd->add_option("--n", opt.n, "sample size")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "base seed")->capture_default_str();
  cmd->add_option("--replication", opt.replication, "replication index")->capture_default_str();
  cmd->add_option("--d", flags.d, "covariate dimension")->capture_default_str();
  cmd->add_option("--m", flags.m, "constant | affine | quadratic | sinusoid")
      ->capture_default_str();
  cmd->add_option("--g", flags.g, "uniform | truncated_normal")->capture_default_str();
  cmd->add_option("--f", flags.f, "normal | laplace | beta | zero")->capture_default_str();
  cmd->add_option("--sigma", flags.sigma, "error standard deviation")->capture_default_str();
  cmd->add_option("--support-lo", flags.support_lo, "support box lower corner")
      ->delimiter(',');
  cmd->add_option("--support-hi", flags.support_hi, "support box upper corner")
      ->delimiter(',');
  cmd->add_option("--trim-lo", flags.trim_lo, "trim box lower corner")->delimiter(',');
  cmd->add_option("--trim-hi", flags.trim_hi, "trim box upper corner")->delimiter(',');
  cmd->add_option("--design", flags.design, "random | equispaced")->capture_default_str();
  cmd->add_option("--out", opt.output, "output CSV (stdout when omitted)");
}

std::vector<double> widen(const std::vector<double>& v, int d) {
  if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(d), v[0]);
  return v;
}

void apply(const DgpFlags& flags, resdens::SimulateOptions& opt) {
  auto& dgp = opt.dgp;
  dgp.dim = flags.d;
  dgp.m = resdens::parse_regression_fn(flags.m);
  dgp.g = resdens::parse_covariate_law(flags.g);
  dgp.f = resdens::parse_error_law(flags.f);
  dgp.sigma = flags.sigma;
  dgp.support_lo = widen(flags.support_lo, flags.d);
  dgp.support_hi = widen(flags.support_hi, flags.d);
  dgp.trim_lo = widen(flags.trim_lo, flags.d);
  dgp.trim_hi = widen(flags.trim_hi, flags.d);
  opt.design = resdens::parse_design(flags.design);
}

int finish(const resdens::CommandResult& res) {
  const bool error = res.summary.rfind("error:", 0) == 0;
  (error ? std::cerr : std::cout) << res.summary;
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage regression-error density estimation and rate checks"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "OpenMP threads (0 = default)")->capture_default_str();

  // estimate
  resdens::EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "estimate the error density from a CSV");
  estimate->add_option("input", est.input, "CSV with columns x1..xd,y")->required();
  estimate->add_option("--b0", est.b0, "regression bandwidth")->required();
  estimate->add_option("--b1", est.b1, "density bandwidth")->required();
  estimate->add_option("--trim-lo", est.trim_lo, "trim box lower corner")->delimiter(',');
  estimate->add_option("--trim-hi", est.trim_hi, "trim box upper corner")->delimiter(',');
  estimate->add_option("--grid-points", est.grid_points, "evaluation points")
      ->capture_default_str();
  estimate->add_option("--grid-lo", est.grid_lo, "first evaluation point");
  estimate->add_option("--grid-hi", est.grid_hi, "last evaluation point");
  estimate->add_option("--kernel", est.kernel, "density-stage kernel")->capture_default_str();
  estimate->add_option("--out", est.output, "output CSV (stdout when omitted)");
  estimate->add_option("--workers", workers, "OpenMP threads");

  // kernel-check
  std::string kernel_name = "quadweight";
  double kernel_tol = 1e-9;
  auto* kcheck = app.add_subcommand("kernel-check", "certify the kernel conditions");
  kcheck->add_option("kernel,--kernel", kernel_name, "kernel name")->capture_default_str();
  kcheck->add_option("--tol", kernel_tol, "absolute tolerance")->capture_default_str();

  // rates
  resdens::RatesOptions rates;
  auto* rcmd = app.add_subcommand("rates", "run a rate experiment from a config file");
  rcmd->add_option("config", rates.config, "flat key = value or JSON config")->required();
  rcmd->add_option("--out", rates.out_dir, "output directory")->capture_default_str();
  rcmd->add_option("--workers", workers, "OpenMP threads");

  // validate-bandwidths
  int vd = 1;
  std::string va = "0.2", vg = "0.2";
  double c0 = 1.0, c1 = 1.0;
  bool vjson = false;
  auto* vcmd = app.add_subcommand("validate-bandwidths",
                                  "check A8/A9 for b0 = c0 n^-a, b1 = c1 n^-gamma");
  vcmd->add_option("--d", vd, "covariate dimension")->capture_default_str();
  vcmd->add_option("--a", va, "b0 exponent (fractions allowed)")->capture_default_str();
  vcmd->add_option("--gamma", vg, "b1 exponent (fractions allowed)")->capture_default_str();
  vcmd->add_option("--c0", c0, "b0 constant")->capture_default_str();
  vcmd->add_option("--c1", c1, "b1 constant")->capture_default_str();
  vcmd->add_flag("--json", vjson, "print the report as JSON");

  // simulate
  resdens::SimulateOptions sim;
  DgpFlags sim_flags;
  auto* scmd = app.add_subcommand("simulate", "emit a simulated sample as CSV");
  add_sample_flags(scmd, sim_flags, sim);
  scmd->add_option("--workers", workers, "OpenMP threads");

  // diagnose
  resdens::DiagnoseOptions diag;
  DgpFlags diag_flags;
  auto* dcmd = app.add_subcommand("diagnose",
                                  "simulate a sample and dump the per-observation terms");
  add_sample_flags(dcmd, diag_flags, diag.sample);
  dcmd->add_option("--b0", diag.b0, "regression bandwidth")->capture_default_str();
  dcmd->add_option("--b1", diag.b1, "density bandwidth")->capture_default_str();
  dcmd->add_option("--e", diag.e, "evaluation point")->capture_default_str();
  dcmd->add_option("--kernel", diag.kernel, "density-stage kernel")->capture_default_str();
  dcmd->add_option("--workers", workers, "OpenMP threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  resdens::set_workers(workers);
  resdens::CommandResult res;
  if (*estimate) {
    res = resdens::run_guarded([&] { return resdens::cmd_estimate(est); });
  } else if (*kcheck) {
    res = resdens::run_guarded(
        [&] { return resdens::cmd_kernel_check(kernel_name, kernel_tol); });
  } else if (*rcmd) {
    rates.workers = workers;
    res = resdens::run_guarded([&] { return resdens::cmd_rates(rates); });
  } else if (*vcmd) {
    res = resdens::run_guarded([&] {
      return resdens::cmd_validate_bandwidths(vd, resdens::parse_number(va),
                                              resdens::parse_number(vg), c0, c1, vjson);
    });
  } else if (*scmd) {
    res = resdens::run_guarded([&] {
      apply(sim_flags, sim);
      return resdens::cmd_simulate(sim);
    });
  } else if (*dcmd) {
    res = resdens::run_guarded([&] {
      apply(diag_flags, diag.sample);
      return resdens::cmd_diagnose(diag);
    });
  }
  return finish(res);
}
