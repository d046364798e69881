#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bandforge/curve.hpp"
#include "bandforge/density.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/kde.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/rng.hpp"
#include "doctest.h"

using namespace bandforge;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t key) {
  RngStream rng(key);
  std::vector<double> x(n);
  for (double& v : x) v = rng.next_normal();
  return x;
}

}  // namespace

TEST_CASE("density band half-width arithmetic") {
  DensityEstimate est;
  est.grid = {0.0};
  est.fhat = {0.5};
  est.n = 100;
  est.bandwidth = 0.2;
  est.scale = {std::sqrt(0.6 * 0.5 / (100.0 * 0.2))};
  BandResult band = density_naive_band(est, 0.05);
  CHECK(band.upper[0] - band.center[0] ==
        doctest::Approx(0.24004558381776552).epsilon(1e-14));
  CHECK(band.center[0] - band.lower[0] ==
        doctest::Approx(0.24004558381776552).epsilon(1e-14));
}

TEST_CASE("zero density means zero half-width, quadrupling it doubles the width") {
  DensityEstimate est;
  est.grid = {0.0, 1.0, 2.0};
  est.fhat = {0.0, 0.1, 0.4};
  est.n = 50;
  est.bandwidth = 0.3;
  const double nh = 50.0 * 0.3;
  for (double f : est.fhat) est.scale.push_back(std::sqrt(0.6 * f / nh));
  BandResult band = density_naive_band(est, 0.05);
  CHECK(band.upper[0] == band.lower[0]);
  double w1 = band.upper[1] - band.lower[1];
  double w2 = band.upper[2] - band.lower[2];
  CHECK(w2 == doctest::Approx(2.0 * w1).epsilon(1e-12));
}

TEST_CASE("lower envelope clamps at zero only when asked") {
  std::vector<double> x = normal_sample(40, 8);
  std::vector<double> grid = make_grid(-3.5, 3.5, 29);
  DensityEstimate est = fit_density(x, 0.4, Kernel::gaussian(), grid);
  BandResult raw = density_naive_band(est, 0.05, false);
  BandResult clamped = density_naive_band(est, 0.05, true);
  bool saw_negative = false;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (raw.lower[j] < 0.0) saw_negative = true;
    CHECK(clamped.lower[j] >= 0.0);
    CHECK(clamped.upper[j] == raw.upper[j]);
  }
  CHECK(saw_negative);  // the tails do dip below zero before clamping
}

TEST_CASE("density fit matches the plain estimate and its scale formula") {
  std::vector<double> x = normal_sample(60, 9);
  std::vector<double> grid = make_grid(-2.0, 2.0, 9);
  double h = 0.35;
  DensityEstimate est = fit_density(x, h, Kernel::epanechnikov(), grid);
  std::vector<double> f = kde(x, h, Kernel::epanechnikov(), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(est.fhat[j] == f[j]);
    CHECK(est.scale[j] ==
          doctest::Approx(std::sqrt(0.6 * f[j] / (60.0 * h))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(fit_density({}, 0.3, Kernel::gaussian(), grid), InputError);
  CHECK_THROWS_AS(fit_density(x, 0.0, Kernel::gaussian(), grid), ConfigError);
}

TEST_CASE("smoothed resample has the estimate's own moments") {
  // X* = X_J + h W, so E X* = mean(X) and Var X* = pop-var(X) + h^2 var(W);
  // check both against 4 standard errors over m draws
  std::vector<double> x = normal_sample(200, 10);
  const double h = 0.5;
  Kernel k = Kernel::epanechnikov();
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(x.size());
  double vx = 0.0;
  for (double v : x) vx += (v - mx) * (v - mx);
  vx /= static_cast<double>(x.size());
  const double target_var = vx + h * h * 0.2;

  DensityEstimate est = fit_density(x, h, k, make_grid(-2.0, 2.0, 5));
  const std::size_t m = 120000;
  RngStream rng = substream(99, rng_domain::kDensity, 0);
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double v = x[rng.next_below(x.size())] + h * k.sample(rng);
    s1 += v;
    double c = v - mx;
    s2 += c * c;
    s4 += c * c * c * c;
  }
  double md = static_cast<double>(m);
  double mean_draw = s1 / md;
  double var_draw = s2 / md - (mean_draw - mx) * (mean_draw - mx);
  double se_mean = std::sqrt(target_var / md);
  CHECK(std::fabs(mean_draw - mx) < 4.0 * se_mean);
  double var_of_sq = s4 / md - (s2 / md) * (s2 / md);
  CHECK(std::fabs(var_draw - target_var) < 4.0 * std::sqrt(var_of_sq / md));
}

TEST_CASE("smoothed bootstrap statistic replays exactly from its seed") {
  // reconstruct each replicate's draws from the documented substream and
  // recompute the statistic; everything must match bit for bit
  std::vector<double> x = normal_sample(70, 15);
  std::vector<double> grid = make_grid(-1.5, 1.5, 13);
  const double h = 0.45;
  Kernel k = Kernel::epanechnikov();
  DensityEstimate est = fit_density(x, h, k, grid);
  const std::size_t B = 6;
  const std::uint64_t seed = 2718;
  BootstrapEnsemble ens = make_density_bootstrap(x, est, k, B, seed);
  const double nh = static_cast<double>(x.size()) * h;
  for (std::size_t b = 0; b < B; ++b) {
    RngStream rng = substream(seed, rng_domain::kDensity, b);
    std::vector<double> xstar(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      xstar[i] = x[rng.next_below(x.size())] + h * k.sample(rng);
    std::vector<double> fstar = kde(xstar, h, k, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double num = std::fabs(fstar[j] - est.fhat[j]);
      double denom = std::sqrt(k.kappa * fstar[j] / nh);
      double want = denom > 0.0
                        ? num / denom
                        : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      CHECK(ens.tstat[b * grid.size() + j] == want);
    }
  }
  CHECK(ens.sigma2star == std::vector<double>(B, 1.0));
}

TEST_CASE("smoothed resampling rejects kernels without a sampler") {
  std::vector<double> x = normal_sample(30, 11);
  std::vector<double> grid = make_grid(-1.0, 1.0, 5);
  DensityEstimate est = fit_density(x, 0.4, Kernel::biweight(), grid);
  CHECK_THROWS_AS(make_density_bootstrap(x, est, Kernel::biweight(), 4, 1),
                  UnsamplableKernel);
}

TEST_CASE("density calibration is a plain band at the solved level") {
  std::vector<double> x = normal_sample(120, 12);
  std::vector<double> grid = make_grid(-1.5, 1.5, 31);
  double h = silverman_bandwidth(x, Kernel::gaussian());
  DensityCalibration cal =
      density_band_calibrate(x, h, Kernel::gaussian(), grid, 0.05, 0.1, 199, 5);
  CHECK(cal.profile.alpha0 == 0.05);
  CHECK(cal.profile.xi == 0.1);
  CHECK(cal.profile.alpha_hat_xi > 0.0);
  CHECK(cal.profile.alpha_hat_xi <= 1.0);
  CHECK(cal.band.alpha == cal.profile.alpha_hat_xi);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(cal.band.lower[j] <= cal.est.fhat[j]);
    CHECK(cal.est.fhat[j] <= cal.band.upper[j]);
  }
  // the final band is nothing but the plain band rebuilt at the solved level
  BandResult rebuilt = density_naive_band(cal.est, cal.profile.alpha_hat_xi);
  CHECK(cal.band.center == rebuilt.center);
  CHECK(cal.band.lower == rebuilt.lower);
  CHECK(cal.band.upper == rebuilt.upper);
}

TEST_CASE("density calibrated level is monotone in the trim fraction") {
  std::vector<double> x = normal_sample(80, 13);
  std::vector<double> grid = make_grid(-1.2, 1.2, 15);
  DensityEstimate est = fit_density(x, 0.45, Kernel::gaussian(), grid);
  BootstrapEnsemble ens = make_density_bootstrap(x, est, Kernel::gaussian(), 99, 21);
  double prev = 0.0;
  for (double xi : {0.05, 0.15, 0.3, 0.5}) {
    double a = calibrate(ens, 0.05, xi).alpha_hat_xi;
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("point mass input stays finite under smoothing") {
  std::vector<double> x(25, 1.5);
  std::vector<double> grid = make_grid(0.5, 2.5, 11);
  double h = silverman_bandwidth(x, Kernel::gaussian());
  DensityCalibration cal =
      density_band_calibrate(x, h, Kernel::gaussian(), grid, 0.05, 0.1, 49, 3);
  for (double b : cal.profile.beta_hat) {
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
  }
  for (double v : cal.est.fhat) CHECK(std::isfinite(v));
}

TEST_CASE("density resampling is reproducible and thread-count independent") {
  std::vector<double> x = normal_sample(50, 14);
  std::vector<double> grid = make_grid(-1.0, 1.0, 7);
  DensityEstimate est = fit_density(x, 0.4, Kernel::gaussian(), grid);
  BootstrapEnsemble a = make_density_bootstrap(x, est, Kernel::gaussian(), 32, 6, 1);
  BootstrapEnsemble b = make_density_bootstrap(x, est, Kernel::gaussian(), 32, 6, 4);
  CHECK(a.tstat == b.tstat);
}
