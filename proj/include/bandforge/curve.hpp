#pragma once

#include <vector>

#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/variance.hpp"

namespace bandforge {

// Positivity floor for design-density values entering the scale function.
inline constexpr double kDensityFloor = 1e-12;

// Fitted mean curve with everything a band construction needs: the grid, the
// fit, the per-point scale s(x) = sqrt(kappa / (n h fhat_X(x))) (standard
// deviation of the local-linear estimate per unit sigma), and the noise
// variance estimate.
struct CurveEstimate {
  std::vector<double> grid;
  std::vector<double> ghat;
  std::vector<double> scale;
  double sigma2hat = 0.0;
  double bandwidth = 0.0;
};

// s(x) on the grid from a design-density estimate. Throws ZeroDensity where
// fhat_x falls at or below kDensityFloor.
std::vector<double> scale_function(std::size_t n, double h, const Kernel& kernel,
                                   const std::vector<double>& fhat_x,
                                   const std::vector<double>& grid);

// Full fit pipeline: local-linear ghat on the grid, design density by KDE at
// the rule-of-thumb bandwidth (same kernel), scale, and the chosen noise
// variance estimator.
CurveEstimate fit_curve(const Dataset& data, double h, const Kernel& kernel,
                        const std::vector<double>& grid,
                        SigmaEstimator sigma_est = SigmaEstimator::kDifference);

// Uniformly spaced grid of n points spanning [a, b].
std::vector<double> make_grid(double a, double b, std::size_t n);

}  // namespace bandforge
