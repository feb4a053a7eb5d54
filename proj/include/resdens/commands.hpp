#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resdens/dgp.hpp"

namespace resdens {

/// Exit codes: 0 success, 1 validation failure, 2 usage or config error,
/// 3 runtime error. A nonzero code always comes with a failure line in
/// `summary`.
struct CommandResult {
  int exit_code = 0;
  std::string summary;
  std::vector<std::string> artifacts;
};

struct EstimateOptions {
  std::string input;
  std::string output;
  double b0 = 0.0;
  double b1 = 0.0;
  /// Scalars are broadcast to every axis; empty means the data range.
  std::vector<double> trim_lo;
  std::vector<double> trim_hi;
  std::size_t grid_points = 512;
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::string kernel = "quadweight";
};
CommandResult cmd_estimate(const EstimateOptions& opt);

CommandResult cmd_kernel_check(const std::string& kernel, double tolerance);

struct RatesOptions {
  std::string config;
  std::string out_dir = ".";
  int workers = 0;  ///< overrides the config when > 0
};
CommandResult cmd_rates(const RatesOptions& opt);

/// Power-law schedules b0 = c0 n^-a, b1 = c1 n^-gamma.
CommandResult cmd_validate_bandwidths(int d, double a, double gamma, double c0 = 1.0,
                                      double c1 = 1.0, bool json = false);

struct SimulateOptions {
  DGPSpec dgp = DGPSpec::default_acceptance();
  std::size_t n = 500;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  DesignKind design = DesignKind::random;
  std::string output;
};
CommandResult cmd_simulate(const SimulateOptions& opt);

/// Simulates one sample and writes the per-observation decomposition table.
struct DiagnoseOptions {
  SimulateOptions sample;
  double b0 = 0.1;
  double b1 = 0.1;
  double e = 0.0;
  std::string kernel = "quadweight";
};
CommandResult cmd_diagnose(const DiagnoseOptions& opt);

/// Runs a command, mapping library exceptions to exit codes: malformed
/// input, configuration and usage errors to 2, AllTrimmed to 1, anything else
/// (degenerate experiments, quadrature failures, I/O) to 3.
CommandResult run_guarded(const std::function<CommandResult()>& command);

/// Applies a --workers value (0 keeps the OpenMP default).
void set_workers(int workers);

}  // namespace resdens
