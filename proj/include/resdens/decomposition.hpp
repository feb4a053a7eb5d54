#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "resdens/dgp.hpp"
#include "resdens/kernel.hpp"
#include "resdens/smoother.hpp"

namespace resdens {

/// Split of the trimmed leave-one-out fitting error into a smoothing-bias
/// part and a noise part:
///   beta_i  = 1(X_i in X0) sum_{j!=i} (m(X_j) - m(X_i)) w_ij / sum_{j!=i} w_ij
///   sigma_i = 1(X_i in X0) sum_{j!=i} eps_j w_ij / sum_{j!=i} w_ij
/// so beta_i + sigma_i = 1(X_i in X0) (m_hat_in - m(X_i)). Requires simulated
/// data (true m and eps).
struct DecompositionTerms {
  std::vector<double> beta;
  std::vector<double> sigma;
  std::vector<double> g_hat;
  std::vector<std::uint8_t> in_trim;
  /// 0 where X_i is in the trim box but its neighbourhood is empty.
  std::vector<std::uint8_t> defined;
  double b0 = 0.0;
};

DecompositionTerms decompose(const LeaveOneOutSmoother& smoother, const TrimRegion& trim);

/// Single-observation versions. Throw DegenerateDenominator when X_i is in
/// the trim box and g_hat_in = 0.
double beta_in(const Dataset& data, const ProductKernel& k0, double b0,
               const TrimRegion& trim, std::size_t i);
double sigma_in(const Dataset& data, const ProductKernel& k0, double b0,
                const TrimRegion& trim, std::size_t i);

/// integral_0^1 (1 - t)^2 K'''(a - t h) dt, splitting [0, 1] where a - t h
/// crosses the support edges.
double taylor_remainder_integral(const UnivariateKernel& k1, double a, double h,
                                 const QuadratureSpec& quad);
/// Same integral by one 10-point Gauss-Legendre pass per polynomial piece,
/// which is exact for the polynomial kernels provided here.
double taylor_remainder_integral(const UnivariateKernel& k1, double a, double h);

struct TaylorTerms {
  double zeta = 0.0;   ///< 1(kept) (m_hat - m)^2 K''((eps - e)/b1)
  double i_rem = 0.0;  ///< t-integral of (1-t)^2 K'''((eps - t(m_hat - m) - e)/b1)
  double r = 0.0;      ///< 1(kept) (m_hat - m)^3 I
};

/// Per-observation second-order terms and third-order remainders of the
/// expansion of K1((eps_hat_i - e)/b1) around the true error. Observations
/// that are not kept get zeros.
std::vector<TaylorTerms> taylor_terms(const ResidualFit& fit, const Dataset& data,
                                      const UnivariateKernel& k1, double b1, double e,
                                      const QuadratureSpec& quad);

struct PropSums {
  double s_beta = 0.0;   ///< sum beta_i K'((eps_i - e)/b1)
  double s_sigma = 0.0;  ///< sum sigma_i K'((eps_i - e)/b1)
  double s_zeta = 0.0;   ///< sum zeta_i
  double s_r = 0.0;      ///< sum R_i
};

PropSums prop_sums(const DecompositionTerms& terms, std::span<const TaylorTerms> taylor,
                   const Dataset& data, const UnivariateKernel& k1, double e, double b1);

/// Intermediate averages appearing in the bounds on the decomposition.
struct AuxiliaryStats {
  std::vector<double> nu;         ///< centred average of the bias numerators
  std::vector<double> nu_bar;     ///< its expectation, by quadrature
  std::vector<double> g_tilde;    ///< (1/(n b0^d)) sum K0^2
  std::vector<double> g_cross;    ///< (1/(n b0^d)^2) sum_j sum_k K0(ik) K0(kj)
  std::vector<double> g_quartic;  ///< (1/(n b0^d)) sum K0^4
  double m_big = 0.0;             ///< M_n
  double cross_over_ghat = 0.0;   ///< sum 1(X0) g_cross / g_hat
  double tilde_over_ghat = 0.0;   ///< sum 1(X0) g_tilde / g_hat
  double tilde_over_ghat2 = 0.0;  ///< sum 1(X0) g_tilde / g_hat^2
};

/// nu_bar(x) = 1(x in X0) integral (m(x + b0 z) - m(x)) K0(z) g(x + b0 z) dz.
double nu_bar(const DGPSpec& dgp, const ProductKernel& k0, double b0,
              std::span<const double> x, const TrimRegion& trim,
              const QuadratureSpec& quad);

AuxiliaryStats auxiliary_stats(const LeaveOneOutSmoother& smoother,
                               const DecompositionTerms& terms, const DGPSpec& dgp,
                               const TrimRegion& trim, const QuadratureSpec& quad);

// ------------------------------------------------ conditional (given X) moments

/// Per-observation Monte Carlo averages of 1(X_i in X0)(m_hat_in - m(X_i))^k
/// for each requested k, X held fixed and the errors redrawn R times from the
/// DGP's error law, plus the supremum over i. All powers share the same draws.
struct ConditionalMoments {
  std::vector<int> powers;
  std::vector<std::vector<double>> per_obs;  ///< [power][i]
  std::vector<double> sup;                   ///< [power]
  std::size_t replications = 0;
};

/// `smoother` must be built on a dataset that carries m(X_i). Throws
/// InsufficientReplications for R < 2.
ConditionalMoments conditional_moments(const LeaveOneOutSmoother& smoother,
                                       const DGPSpec& dgp, const TrimRegion& trim,
                                       std::span<const int> powers, std::size_t replications,
                                       std::uint64_t seed);

enum class SumStatistic { s_beta, s_sigma, s_zeta, s_r };
SumStatistic parse_sum_statistic(std::string_view name);

/// Values of the chosen aggregate in each of R error redraws (X fixed).
std::vector<double> replicate_sum(SumStatistic statistic, const LeaveOneOutSmoother& smoother,
                                  const DGPSpec& dgp, const TrimRegion& trim,
                                  const UnivariateKernel& k1, double b1, double e,
                                  std::size_t replications, std::uint64_t seed);

/// Sample variance of replicate_sum. Throws InsufficientReplications for R < 2.
double conditional_variance_of_sum(SumStatistic statistic,
                                   const LeaveOneOutSmoother& smoother, const DGPSpec& dgp,
                                   const TrimRegion& trim, const UnivariateKernel& k1,
                                   double b1, double e, std::size_t replications,
                                   std::uint64_t seed);

/// Per-observation diagnostic table
/// i,beta,sigma,zeta,r,g_hat,g_tilde,trimmed (trimmed = 1 when kept).
void write_diagnostics_csv(std::ostream& out, const DecompositionTerms& terms,
                           std::span<const TaylorTerms> taylor, const AuxiliaryStats& aux,
                           const ResidualFit& fit);

}  // namespace resdens
