#pragma once

#include <cstdint>
#include <vector>

#include "bandforge/bootstrap.hpp"
#include "bandforge/curve.hpp"

namespace bandforge {

// Signed, scale-normalized first-level bootstrap deviations
//   dev_b(x) = (ghat*_b(x) - ghat(x)) / s(x).
struct DeviationEnsemble {
  std::size_t B = 0;
  std::vector<double> grid;
  std::vector<double> dev;  // B x grid.size(), row-major
  std::uint64_t seed = 0;

  double d(std::size_t b, std::size_t j) const { return dev[b * grid.size() + j]; }
};

// Equal-tailed percentile band: lower/upper are ghat + s * zhat at the alpha/2
// and 1-alpha/2 empirical quantiles of the deviations.
struct PercentileBand {
  std::vector<double> grid;
  std::vector<double> center;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> zhat_lo;
  std::vector<double> zhat_hi;
  double alpha = 0.0;
};

struct DoubleBootstrapResult {
  CalibrationProfile profile;
  PercentileBand band;
};

// Empirical quantile rank convention used throughout: ceil(p*(B+1)) clamped
// to [1, B], applied to the ascending order statistics.
std::size_t quantile_rank(double p, std::size_t B);

DeviationEnsemble make_deviation_ensemble(const Dataset& data, const CurveEstimate& est,
                                          const Kernel& kernel, std::size_t B,
                                          std::uint64_t seed, unsigned threads = 1);

// zhat_beta(x): per-point empirical beta-quantile of the deviations.
std::vector<double> percentile_critical_values(const DeviationEnsemble& ens, double beta);

PercentileBand build_percentile_band(const CurveEstimate& est,
                                     const DeviationEnsemble& ens, double alpha);

// Double bootstrap calibration of the equal-tailed percentile band. Second
// level resamples are drawn inside each first-level replicate (centered
// uncentred-residual trick), the bootstrap-world coverage pi_hat(x, alpha) is
// the fraction of first-level replicates whose second-level band contains
// ghat(x), beta_hat solves pi_hat = 1 - alpha0 conservatively on the grid of
// attainable levels, and the returned band is the first-level percentile band
// at the xi-quantile of beta_hat. Guarded against B1*B2 > 10^6 per grid point
// unless allow_expensive is set.
DoubleBootstrapResult double_bootstrap_calibrate(const Dataset& data,
                                                 const CurveEstimate& est,
                                                 const Kernel& kernel, std::size_t B1,
                                                 std::size_t B2, double alpha0, double xi,
                                                 std::uint64_t seed,
                                                 bool allow_expensive = false,
                                                 unsigned threads = 1);

}  // namespace bandforge
