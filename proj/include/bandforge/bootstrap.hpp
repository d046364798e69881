#pragma once

#include <cstdint>
#include <vector>

#include "bandforge/band.hpp"
#include "bandforge/curve.hpp"

namespace bandforge {

// Matrix of studentized absolute bootstrap deviations
//   T_b(x) = |ghat*_b(x) - ghat(x)| / (s(x) * sigma*_b),
// one row per replicate, plus the per-replicate noise-scale re-estimates.
// Entries are nonnegative and finite (exact 0/0 cases are defined as 0).
struct BootstrapEnsemble {
  std::size_t B = 0;
  std::vector<double> grid;
  std::vector<double> tstat;       // B x grid.size(), row-major
  std::vector<double> sigma2star;  // per replicate
  std::uint64_t seed = 0;

  double t(std::size_t b, std::size_t j) const { return tstat[b * grid.size() + j]; }
};

// Per-point level profile from solving the coverage condition, and the
// calibrated level: alpha_hat_xi = lower empirical xi-quantile of beta_hat.
struct CalibrationProfile {
  std::vector<double> grid;
  std::vector<double> beta_hat;
  double alpha_hat_xi = 0.0;
  double alpha0 = 0.0;
  double xi = 0.0;
};

// Residual bootstrap with the design held fixed: centered residuals are
// resampled, the curve is refitted at the same bandwidth, and the noise scale
// is re-estimated per replicate by the same estimator choice as est.sigma2hat.
BootstrapEnsemble make_residual_bootstrap(
    const Dataset& data, const CurveEstimate& est, const Kernel& kernel,
    std::size_t B, std::uint64_t seed,
    SigmaEstimator sigma_est = SigmaEstimator::kDifference, unsigned threads = 1);

// Heteroscedastic variant: raw residuals are standardized by sigma_design
// (the conditional-sd estimate at the design points), the standardized pool is
// re-centered, and resamples are rebuilt as ghat(X_i) + sigma_design_i * e*.
// T uses s(x) * sigma_grid(x) * rho*_b in the denominator, where rho*_b is the
// replicate's noise re-estimate on the standardized scale (paired-difference
// form, each first difference scaled by the root mean square of the two
// conditional sds). With sigma constant this reproduces the homoscedastic
// ensemble exactly. Throws ZeroScale if some sigma_design_i vanishes under a
// nonzero residual.
BootstrapEnsemble make_hetero_bootstrap(const Dataset& data, const CurveEstimate& est,
                                        const Kernel& kernel,
                                        const std::vector<double>& sigma_design,
                                        const std::vector<double>& sigma_grid,
                                        std::size_t B, std::uint64_t seed,
                                        unsigned threads = 1);

// Fraction of replicates whose deviation at grid point j is within the
// two-sided normal critical value for level alpha.
double pi_hat(const BootstrapEnsemble& ens, std::size_t j, double alpha);

// Conservative solution of pi_hat(x, beta) = 1 - alpha0 in beta: with q the
// T order statistic of rank ceil((1-alpha0)(B+1)) (clamped to [1,B]),
// beta_hat = 2(1 - Phi(q)). Always satisfies pi_hat(x, beta_hat) >= 1-alpha0.
double beta_hat(const BootstrapEnsemble& ens, std::size_t j, double alpha0);

CalibrationProfile calibrate(const BootstrapEnsemble& ens, double alpha0, double xi);

// The calibrated band: the plain normal-theory band rebuilt at the calibrated
// level alpha_hat_xi.
BandResult final_band(const CurveEstimate& est, const CalibrationProfile& profile);

}  // namespace bandforge
