#include <algorithm>
#include <cmath>
#include <vector>

#include "bandforge/curve.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/percentile.hpp"
#include "bandforge/rng.hpp"
#include "doctest.h"
#include "straight_line.h"

using namespace bandforge;

namespace {

Dataset noisy_line(std::size_t n, std::uint64_t key) {
  RngStream rng(key);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back(2.0 * rng.next_unit() - 1.0);
    d.y.push_back(0.5 * d.x.back() + 0.4 * rng.next_normal());
  }
  return d;
}

}  // namespace

TEST_CASE("empirical quantile rank convention") {
  // ceil(p * (B+1)) clamped into [1, B]
  CHECK(quantile_rank(0.5, 9) == 5);
  CHECK(quantile_rank(0.025, 9) == 1);
  CHECK(quantile_rank(0.975, 9) == 9);   // ceil(9.75) = 10, clamped
  CHECK(quantile_rank(0.25, 3) == 1);
  CHECK(quantile_rank(0.75, 3) == 3);
  CHECK(quantile_rank(0.0001, 500) == 1);
  CHECK(quantile_rank(0.9999, 500) == 500);
}

TEST_CASE("per-point quantiles pick the ranked order statistic") {
  DeviationEnsemble ens;
  ens.B = 9;
  ens.grid = {0.0};
  ens.dev = {3.0, -1.0, 7.0, 0.0, -5.0, 2.0, 1.0, -2.0, 4.0};
  // ascending: -5 -2 -1 0 1 2 3 4 7
  CHECK(percentile_critical_values(ens, 0.5)[0] == 1.0);
  CHECK(percentile_critical_values(ens, 0.1)[0] == -5.0);  // rank 1
  CHECK(percentile_critical_values(ens, 0.9)[0] == 7.0);   // rank 9
  CHECK_THROWS_AS(percentile_critical_values(ens, 0.0), ConfigError);
  CHECK_THROWS_AS(percentile_critical_values(ens, 1.0), ConfigError);
}

TEST_CASE("equal-tailed band uses the deviation quantiles around the fit") {
  Dataset d = noisy_line(40, 11);
  Kernel k = Kernel::epanechnikov();
  std::vector<double> grid = make_grid(-0.6, 0.6, 7);
  CurveEstimate est = fit_curve(d, 0.5, k, grid);
  DeviationEnsemble ens = make_deviation_ensemble(d, est, k, 25, 8);
  PercentileBand band = build_percentile_band(est, ens, 0.1);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(band.lower[j] ==
          doctest::Approx(est.ghat[j] + est.scale[j] * band.zhat_lo[j]).epsilon(1e-14));
    CHECK(band.upper[j] ==
          doctest::Approx(est.ghat[j] + est.scale[j] * band.zhat_hi[j]).epsilon(1e-14));
    CHECK(band.lower[j] <= band.upper[j]);
    CHECK(band.zhat_lo[j] <= band.zhat_hi[j]);
  }
  CHECK_THROWS_AS(build_percentile_band(est, ens, 0.0), ConfigError);
  CHECK_THROWS_AS(make_deviation_ensemble(d, est, k, 0, 8), ConfigError);
}

TEST_CASE("nested two-level trace matches a plain-loop rewrite exactly") {
  Dataset d;
  d.x = {1.0, 2.0, 3.0, 4.0, 5.0};
  d.y = {2.0, 1.0, 3.0, 2.5, 4.0};
  const double h = 2.2;
  std::vector<double> grid = make_grid(1.0, 5.0, 5);
  Kernel k = Kernel::epanechnikov();
  CurveEstimate est = fit_curve(d, h, k, grid);

  DoubleBootstrapResult res =
      double_bootstrap_calibrate(d, est, k, 2, 3, 0.05, 0.5, 313);
  straight_line::TwoLevelTrace ref =
      straight_line::two_level_trace(d.x, d.y, h, grid, 2, 3, 0.05, 0.5, 313);

  REQUIRE(res.profile.beta_hat.size() == ref.beta_hat.size());
  for (std::size_t j = 0; j < ref.beta_hat.size(); ++j)
    CHECK(res.profile.beta_hat[j] == ref.beta_hat[j]);
  CHECK(res.profile.alpha_hat_xi == ref.alpha_hat);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(res.band.lower[j] == ref.lower[j]);
    CHECK(res.band.upper[j] == ref.upper[j]);
  }
}

TEST_CASE("two-level profile levels are attainable rank levels") {
  Dataset d = noisy_line(35, 21);
  Kernel k = Kernel::epanechnikov();
  std::vector<double> grid = make_grid(-0.6, 0.6, 5);
  CurveEstimate est = fit_curve(d, 0.6, k, grid);
  const std::size_t B2 = 19;
  DoubleBootstrapResult res =
      double_bootstrap_calibrate(d, est, k, 30, B2, 0.05, 0.5, 7);
  // every solved level is either an attainable two-tailed rank level or the
  // smallest representable fallback 1/(B2+1)
  for (double b : res.profile.beta_hat) {
    bool ok = b == 1.0 / static_cast<double>(B2 + 1);
    for (std::size_t kk = 1; kk <= B2 && !ok; ++kk) {
      double a1 = 2.0 * static_cast<double>(kk) / static_cast<double>(B2 + 1);
      double a2 = 2.0 * (1.0 - static_cast<double>(kk) / static_cast<double>(B2 + 1));
      ok = (b == a1) || (b == a2);
    }
    CHECK(ok);
  }
  CHECK(res.profile.alpha_hat_xi > 0.0);
  CHECK(res.profile.alpha_hat_xi < 1.0);
}

TEST_CASE("nested resampling cost guard") {
  Dataset d = noisy_line(30, 31);
  Kernel k = Kernel::epanechnikov();
  std::vector<double> grid = make_grid(-0.5, 0.5, 3);
  CurveEstimate est = fit_curve(d, 0.6, k, grid);
  CHECK_THROWS_AS(
      double_bootstrap_calibrate(d, est, k, 2000, 2000, 0.05, 0.1, 1),
      ConfigError);
  CHECK_THROWS_AS(double_bootstrap_calibrate(d, est, k, 0, 3, 0.05, 0.1, 1),
                  ConfigError);
  CHECK_THROWS_AS(double_bootstrap_calibrate(d, est, k, 2, 3, 0.05, 0.9, 1),
                  ConfigError);
}

TEST_CASE("two-level resampling is thread-count independent") {
  Dataset d = noisy_line(40, 41);
  Kernel k = Kernel::epanechnikov();
  std::vector<double> grid = make_grid(-0.6, 0.6, 5);
  CurveEstimate est = fit_curve(d, 0.5, k, grid);
  DoubleBootstrapResult a =
      double_bootstrap_calibrate(d, est, k, 16, 9, 0.05, 0.25, 77, false, 1);
  DoubleBootstrapResult b =
      double_bootstrap_calibrate(d, est, k, 16, 9, 0.05, 0.25, 77, false, 4);
  CHECK(a.profile.beta_hat == b.profile.beta_hat);
  CHECK(a.band.lower == b.band.lower);
  CHECK(a.band.upper == b.band.upper);
}
