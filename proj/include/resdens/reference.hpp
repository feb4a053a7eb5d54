#pragma once

// Serial brute-force O(n^2) versions of the parallel kernels. They share no
// code with the grid/OpenMP paths beyond the kernel evaluation itself and are
// kept as test oracles and benchmark baselines.

#include <span>
#include <vector>

#include "resdens/density.hpp"
#include "resdens/smoother.hpp"

namespace resdens::reference {

/// Double loop over all pairs, zero weights included.
ResidualFit fit_residuals(const Dataset& data, const ProductKernel& k0, double b0,
                          const TrimRegion& trim);

/// Every observation against every grid point, single thread.
DensityCurve fhat(const ResidualFit& fit, const UnivariateKernel& k1, double b1,
                  std::span<const double> grid);

/// Full n x n table of K0((X_j - X_i)/b0), diagonal zeroed.
std::vector<double> weight_matrix(const Dataset& data, const ProductKernel& k0,
                                  double b0);

}  // namespace resdens::reference
