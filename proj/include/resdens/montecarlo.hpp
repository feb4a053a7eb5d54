#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resdens/bandwidth.hpp"
#include "resdens/dgp.hpp"
#include "resdens/kernel.hpp"
#include "resdens/quadrature.hpp"

namespace resdens {

/// Least-squares fit of log y on log x.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
};

/// Throws GridError for fewer than 4 points, unequal lengths or xs that are
/// not strictly monotone, LogDomainError for nonpositive values.
RateFit fit_rate(std::span<const double> xs, std::span<const double> ys);

/// Quantities whose order can be measured.
///   prop1_beta         median_R sup_i |beta_in|             vs b0, claimed slope 2
///   lemma1_bias        sup_x |g_bar_n(x) - g(x)|             vs b0, claimed slope 2
///   lemma1_stochastic  median_R sup_x |g_hat_n - g_bar_n| / sqrt(ln n/(n b0^d))
///   lemma3_k4, _k6     sup_i E_n[1(X0)(m_hat_in - m)^k] / (b0^4 + 1/(n b0^d))^(k/2)
///   prop2_sigma        Var_n(sum sigma_i K1') / (n b1^4 + b1/b0^d)
///   prop3_zeta         Var_n(sum zeta_i) / ((n b1 + n^2 b0^d b1^3.5) s^2)
///   prop4_r            Var_n(sum R_i) / (n^2 b0^d b1 s^3),  s = b0^4 + 1/(n b0^d)
enum class Target {
  prop1_beta,
  lemma1_bias,
  lemma1_stochastic,
  lemma3_k4,
  lemma3_k6,
  prop2_sigma,
  prop3_zeta,
  prop4_r
};
Target parse_target(std::string_view name);
std::string to_string(Target t);

/// slope: |fitted - claimed| <= band.  ratio: max/min of statistic/envelope <= band.
enum class CertMode { slope, ratio };
CertMode parse_mode(std::string_view name);
std::string to_string(CertMode m);

enum class ScaleVar { b0, b1, n };
ScaleVar parse_scale_var(std::string_view name);
std::string to_string(ScaleVar v);

struct GridPoint {
  std::size_t n = 0;
  double b0 = 0.0;
  double b1 = 0.0;
  double scale = 0.0;  ///< value of the varied quantity
};

struct ExperimentConfig {
  Target target = Target::prop1_beta;
  DGPSpec dgp = DGPSpec::default_acceptance();
  DesignKind design = DesignKind::random;

  std::vector<std::size_t> n_grid{2000};
  std::vector<double> b0_grid;
  std::vector<double> b1_grid;
  /// Used for a bandwidth that has no grid value (typically when n varies).
  std::optional<PowerSchedule> b0_schedule;
  std::optional<PowerSchedule> b1_schedule;
  ScaleVar vary = ScaleVar::b0;

  double e = 0.0;
  std::size_t replications = 50;
  std::uint64_t seed = 1;

  std::optional<CertMode> mode;
  std::optional<double> claimed;
  std::optional<double> band;

  int workers = 0;  ///< 0 leaves the OpenMP default
  std::string kernel = "quadweight";
  QuadratureSpec quad;
  std::size_t x_grid_points = 101;  ///< evaluation points per axis (density-average targets)

  CertMode effective_mode() const;
  double effective_claimed() const;
  double effective_band() const;

  /// Throws ConfigError.
  void validate() const;
  std::vector<GridPoint> points() const;
};

struct RatePoint {
  GridPoint at;
  double statistic = 0.0;  ///< median (or conditional estimate) at this point
  double envelope = 1.0;
  double ratio = 0.0;
  std::size_t used = 0;
  std::size_t degenerate = 0;
  /// Larger over smaller term of each competing pair (see dominance_labels).
  std::vector<double> dominance;
  std::vector<std::string> dominant;
};

struct RateReport {
  Target target = Target::prop1_beta;
  CertMode mode = CertMode::slope;
  std::string scale_name;
  double claimed = 0.0;
  double band = 0.0;
  std::optional<RateFit> fit;           ///< of the statistic against the scale
  std::optional<RateFit> envelope_fit;  ///< of the envelope against the scale
  double spread = 0.0;                  ///< max/min ratio over the grid
  bool pass = false;
  std::vector<std::string> dominance_labels;
  std::string regime;
  std::vector<RatePoint> points;
  std::vector<std::string> warnings;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t degenerate_total = 0;
  std::size_t evaluations_total = 0;

  std::string to_json() const;
  /// scale,n,b0,b1,statistic,envelope,ratio
  void write_csv(std::ostream& out) const;
  std::string summary() const;
};

/// Runs the experiment. Throws ConfigError for invalid configs and
/// DegenerateExperiment when more than 10% of the replications are
/// degenerate (nothing kept, or an empty neighbourhood everywhere).
RateReport run_rate_experiment(const ExperimentConfig& config);

/// Envelope for `target` at one grid point.
double target_envelope(Target target, std::size_t n, double b0, double b1, int d);

/// MISE of the two-stage estimate on one simulated sample, with f_hat
/// tabulated on a grid wide enough to hold both f_hat and most of f.
struct MiseResult {
  double mise = 0.0;
  double mass = 0.0;       ///< trapezoid mass of f_hat on its own grid
  double min_value = 0.0;  ///< smallest tabulated f_hat value
  std::size_t n_kept = 0;
};
MiseResult estimate_mise(const DGPSpec& dgp, std::size_t n, double b0, double b1,
                         const UnivariateKernel& k1, std::uint64_t seed,
                         std::uint64_t replication);

double median(std::vector<double> values);

}  // namespace resdens
