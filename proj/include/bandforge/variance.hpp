#pragma once

#include <vector>

#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"

namespace bandforge {

enum class SigmaEstimator { kDifference, kResidualMoment };

// Raw residuals y_i - ghat(x_i) and the mean-centered version used for
// bootstrap resampling.
struct Residuals {
  std::vector<double> raw;
  std::vector<double> centered;
};

Residuals compute_residuals(const Dataset& data,
                            const std::vector<double>& ghat_at_design);

// First-difference variance estimator: with pairs sorted by x (stable for
// ties), sigma2 = sum (y[i] - y[i-1])^2 / (2(n-1)). Needs no fit at all.
double difference_variance(const Dataset& data);
double difference_variance_sorted(const std::vector<double>& y_by_x);

// Mean of squared centered residuals.
double residual_moment_variance(const Residuals& resid);

// Conditional standard deviation curve: local-linear smooth of the squared
// centered residuals against x, clamped at zero before the square root.
std::vector<double> hetero_scale(const Dataset& data, const Residuals& resid,
                                 double h, const Kernel& kernel,
                                 const std::vector<double>& grid);

}  // namespace bandforge
