#pragma once

#include <vector>

#include "bandforge/kernels.hpp"

namespace bandforge {

// Kernel density estimate (nh)^{-1} sum_i K((x - X_i)/h) at each grid point.
std::vector<double> kde(const std::vector<double>& sample, double h,
                        const Kernel& kernel, const std::vector<double>& grid);

// Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^{-1/5}, rescaled by the
// canonical-kernel factor (kappa/kappa2^2)^{1/5} relative to the Gaussian so
// non-Gaussian kernels smooth by the equivalent amount. Falls back to the
// sample range (or 1.0 for a point mass) when the spread estimate is zero.
double silverman_bandwidth(const std::vector<double>& sample, const Kernel& kernel);

}  // namespace bandforge
