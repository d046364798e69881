#pragma once

#include <cstdint>
#include <vector>

#include "bandforge/band.hpp"
#include "bandforge/bootstrap.hpp"
#include "bandforge/kernels.hpp"

namespace bandforge {

// Kernel density estimate on a grid together with the pointwise asymptotic
// scale sqrt(kappa * fhat(x) / (n h)).
struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> fhat;
  std::vector<double> scale;
  double bandwidth = 0.0;
  std::size_t n = 0;
};

DensityEstimate fit_density(const std::vector<double>& x, double h, const Kernel& kernel,
                            const std::vector<double>& grid);

// fhat(x) +/- z_{1-alpha/2} * scale(x). alpha = 1 collapses to the center.
// clamp_nonneg truncates the lower envelope at zero (a density cannot be
// negative); callers that set it should record the flag alongside the output.
BandResult density_naive_band(const DensityEstimate& est, double alpha,
                              bool clamp_nonneg = false);

// Smoothed bootstrap: X*_i = X_{J_i} + h * W_i with W drawn from the kernel
// itself, so the resampled density is exactly the estimated one. Each
// replicate's statistic is |fhat*(x) - fhat(x)| / sqrt(kappa fhat*(x)/(n h));
// a replicate that vanishes where fhat is positive yields +infinity, which the
// calibration maps to beta_hat at the representable floor.
BootstrapEnsemble make_density_bootstrap(const std::vector<double>& x,
                                         const DensityEstimate& est, const Kernel& kernel,
                                         std::size_t B, std::uint64_t seed,
                                         unsigned threads = 1);

BandResult density_final_band(const DensityEstimate& est, const CalibrationProfile& profile,
                              bool clamp_nonneg = false);

struct DensityCalibration {
  DensityEstimate est;
  CalibrationProfile profile;
  BandResult band;
};

// One-call pipeline: fit, smoothed bootstrap, calibrate, final band.
DensityCalibration density_band_calibrate(const std::vector<double>& x, double h,
                                          const Kernel& kernel,
                                          const std::vector<double>& grid, double alpha0,
                                          double xi, std::size_t B, std::uint64_t seed,
                                          unsigned threads = 1, bool clamp_nonneg = false);

}  // namespace bandforge
