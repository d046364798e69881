#pragma once

#include <vector>

#include "bandforge/band.hpp"
#include "bandforge/curve.hpp"
#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/variance.hpp"

namespace bandforge {

// Baseline band constructions that fight bias without calibration:
// refitting at a deliberately small bandwidth, or subtracting an explicit
// plug-in bias estimate obtained from an oversmoothed pilot fit.
struct CompetitorConfig {
  enum class Method { kUndersmooth, kBiasCorrect };
  Method method = Method::kUndersmooth;
  double factor = 1.0;  // gamma for undersmoothing, lambda for bias correction
  double base_h = 0.0;
};

// Local linear fit at bandwidth gamma * base_h, then the plain normal-theory
// band at that bandwidth (scale recomputed there). gamma = 1 reproduces the
// naive band bit-for-bit because it runs the identical code path.
BandResult undersmooth_band(const Dataset& data, const CompetitorConfig& config,
                            const Kernel& kernel, const std::vector<double>& grid,
                            double alpha, SigmaEstimator sigma_est = SigmaEstimator::kDifference);

// Fit at base_h, estimate bias(x) = (kappa2 / 2) * h^2 * g''(x) with g'' from
// a local cubic fit at the oversmoothed pilot bandwidth base_h / lambda, and
// shift the whole naive band down by the bias estimate. The half-width stays
// at the main bandwidth: the correction moves the center, not the width.
BandResult bias_corrected_band(const Dataset& data, const CompetitorConfig& config,
                               const Kernel& kernel, const std::vector<double>& grid,
                               double alpha,
                               SigmaEstimator sigma_est = SigmaEstimator::kDifference);

}  // namespace bandforge
