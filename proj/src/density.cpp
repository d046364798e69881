#include "bandforge/density.hpp"

#include <cmath>
#include <limits>

#include "bandforge/errors.hpp"
#include "bandforge/kde.hpp"
#include "bandforge/normal.hpp"
#include "bandforge/parallel.hpp"
#include "bandforge/rng.hpp"

namespace bandforge {

DensityEstimate fit_density(const std::vector<double>& x, double h, const Kernel& kernel,
                            const std::vector<double>& grid) {
  if (x.empty()) throw InputError("density fit needs at least one observation");
  if (!(h > 0.0)) throw ConfigError("density bandwidth must be positive");
  DensityEstimate est;
  est.grid = grid;
  est.bandwidth = h;
  est.n = x.size();
  est.fhat = kde(x, h, kernel, grid);
  est.scale.resize(grid.size());
  const double nh = static_cast<double>(est.n) * h;
  for (std::size_t j = 0; j < grid.size(); ++j)
    est.scale[j] = std::sqrt(kernel.kappa * est.fhat[j] / nh);
  return est;
}

BandResult density_naive_band(const DensityEstimate& est, double alpha,
                              bool clamp_nonneg) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("band level alpha must lie in (0, 1]");
  const double z = critical_z(alpha);
  BandResult band;
  band.grid = est.grid;
  band.center = est.fhat;
  band.alpha = alpha;
  band.lower.resize(est.grid.size());
  band.upper.resize(est.grid.size());
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    const double half = z * est.scale[j];
    band.lower[j] = est.fhat[j] - half;
    if (clamp_nonneg && band.lower[j] < 0.0) band.lower[j] = 0.0;
    band.upper[j] = est.fhat[j] + half;
  }
  return band;
}

BootstrapEnsemble make_density_bootstrap(const std::vector<double>& x,
                                         const DensityEstimate& est, const Kernel& kernel,
                                         std::size_t B, std::uint64_t seed,
                                         unsigned threads) {
  if (B == 0) throw ConfigError("bootstrap replicate count must be positive");
  if (!kernel.samplable()) throw UnsamplableKernel(kernel.name());
  const std::size_t n = x.size();
  const std::size_t ng = est.grid.size();
  const double h = est.bandwidth;
  const double nh = static_cast<double>(n) * h;

  BootstrapEnsemble ens;
  ens.B = B;
  ens.grid = est.grid;
  ens.seed = seed;
  ens.tstat.assign(B * ng, 0.0);
  ens.sigma2star.assign(B, 1.0);  // no replicate-level variance in the density world

  parallel_for(B, threads, [&](std::size_t b) {
    RngStream rng = substream(seed, rng_domain::kDensity, b);
    std::vector<double> xstar(n);
    for (std::size_t i = 0; i < n; ++i)
      xstar[i] = x[rng.next_below(n)] + h * kernel.sample(rng);
    std::vector<double> fstar = kde(xstar, h, kernel, est.grid);
    double* row = ens.tstat.data() + b * ng;
    for (std::size_t j = 0; j < ng; ++j) {
      const double num = std::fabs(fstar[j] - est.fhat[j]);
      const double denom = std::sqrt(kernel.kappa * fstar[j] / nh);
      if (denom > 0.0)
        row[j] = num / denom;
      else
        row[j] = (num == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    }
  });
  return ens;
}

BandResult density_final_band(const DensityEstimate& est, const CalibrationProfile& profile,
                              bool clamp_nonneg) {
  return density_naive_band(est, profile.alpha_hat_xi, clamp_nonneg);
}

DensityCalibration density_band_calibrate(const std::vector<double>& x, double h,
                                          const Kernel& kernel,
                                          const std::vector<double>& grid, double alpha0,
                                          double xi, std::size_t B, std::uint64_t seed,
                                          unsigned threads, bool clamp_nonneg) {
  DensityCalibration out;
  out.est = fit_density(x, h, kernel, grid);
  BootstrapEnsemble ens = make_density_bootstrap(x, out.est, kernel, B, seed, threads);
  out.profile = calibrate(ens, alpha0, xi);
  out.band = density_final_band(out.est, out.profile, clamp_nonneg);
  return out;
}

}  // namespace bandforge
