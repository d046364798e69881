#include "bandforge/percentile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bandforge/errors.hpp"
#include "bandforge/local_poly.hpp"
#include "bandforge/parallel.hpp"
#include "bandforge/rng.hpp"
#include "bandforge/variance.hpp"

namespace bandforge {

namespace {

constexpr std::size_t kCostGuard = 1000000;  // max B1*B2 without explicit override

double nth_value(std::vector<double> col, std::size_t rank) {
  std::nth_element(col.begin(), col.begin() + (rank - 1), col.end());
  return col[rank - 1];
}

}  // namespace

std::size_t quantile_rank(double p, std::size_t B) {
  double r = std::ceil(p * static_cast<double>(B + 1));
  if (!(r >= 1.0)) return 1;
  if (r > static_cast<double>(B)) return B;
  return static_cast<std::size_t>(r);
}

DeviationEnsemble make_deviation_ensemble(const Dataset& data, const CurveEstimate& est,
                                          const Kernel& kernel, std::size_t B,
                                          std::uint64_t seed, unsigned threads) {
  if (B == 0) throw ConfigError("bootstrap replicate count must be positive");
  const std::size_t n = data.n();
  const std::size_t ng = est.grid.size();

  WeightMatrix w_grid = local_linear_weights(data.x, est.bandwidth, kernel, est.grid);
  WeightMatrix w_design = local_linear_weights(data.x, est.bandwidth, kernel, data.x);
  std::vector<double> ghat_design = w_design.apply(data.y);
  Residuals resid = compute_residuals(data, ghat_design);

  DeviationEnsemble ens;
  ens.B = B;
  ens.grid = est.grid;
  ens.seed = seed;
  ens.dev.assign(B * ng, 0.0);

  parallel_for(B, threads, [&](std::size_t b) {
    RngStream rng = substream(seed, rng_domain::kBootstrap, b, 0);
    std::vector<double> ystar(n);
    for (std::size_t i = 0; i < n; ++i)
      ystar[i] = ghat_design[i] + resid.centered[rng.next_below(n)];
    std::vector<double> gstar = w_grid.apply(ystar);
    double* row = ens.dev.data() + b * ng;
    for (std::size_t j = 0; j < ng; ++j)
      row[j] = (gstar[j] - est.ghat[j]) / est.scale[j];
  });
  return ens;
}

std::vector<double> percentile_critical_values(const DeviationEnsemble& ens, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
  const std::size_t ng = ens.grid.size();
  const std::size_t rank = quantile_rank(beta, ens.B);
  std::vector<double> out(ng), col(ens.B);
  for (std::size_t j = 0; j < ng; ++j) {
    for (std::size_t b = 0; b < ens.B; ++b) col[b] = ens.d(b, j);
    out[j] = nth_value(col, rank);
  }
  return out;
}

PercentileBand build_percentile_band(const CurveEstimate& est,
                                     const DeviationEnsemble& ens, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("band level alpha must lie in (0, 1)");
  PercentileBand band;
  band.grid = est.grid;
  band.center = est.ghat;
  band.alpha = alpha;
  band.zhat_lo = percentile_critical_values(ens, 0.5 * alpha);
  band.zhat_hi = percentile_critical_values(ens, 1.0 - 0.5 * alpha);
  const std::size_t ng = est.grid.size();
  band.lower.resize(ng);
  band.upper.resize(ng);
  for (std::size_t j = 0; j < ng; ++j) {
    band.lower[j] = est.ghat[j] + est.scale[j] * band.zhat_lo[j];
    band.upper[j] = est.ghat[j] + est.scale[j] * band.zhat_hi[j];
  }
  return band;
}

DoubleBootstrapResult double_bootstrap_calibrate(const Dataset& data,
                                                 const CurveEstimate& est,
                                                 const Kernel& kernel, std::size_t B1,
                                                 std::size_t B2, double alpha0, double xi,
                                                 std::uint64_t seed, bool allow_expensive,
                                                 unsigned threads) {
  if (B1 == 0 || B2 == 0) throw ConfigError("bootstrap replicate counts must be positive");
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw ConfigError("alpha0 must lie in (0, 1)");
  if (!(xi > 0.0 && xi <= 0.5)) throw ConfigError("xi must lie in (0, 0.5]");
  if (B1 * B2 > kCostGuard && !allow_expensive)
    throw ConfigError("double bootstrap cost B1*B2 exceeds 10^6; raise the override to proceed");

  const std::size_t n = data.n();
  const std::size_t ng = est.grid.size();

  WeightMatrix w_grid = local_linear_weights(data.x, est.bandwidth, kernel, est.grid);
  WeightMatrix w_design = local_linear_weights(data.x, est.bandwidth, kernel, data.x);
  std::vector<double> ghat_design = w_design.apply(data.y);
  Residuals resid = compute_residuals(data, ghat_design);

  DeviationEnsemble ens;
  ens.B = B1;
  ens.grid = est.grid;
  ens.seed = seed;
  ens.dev.assign(B1 * ng, 0.0);

  // Per replicate: how many second-level deviations fall at or below / at or
  // above U_b(x) = (ghat(x) - ghat*_b(x)) / s(x). Containment of ghat in the
  // second-level equal-tailed band is a pure rank condition on these counts.
  std::vector<std::uint32_t> m_lo(B1 * ng, 0), m_hi(B1 * ng, 0);

  parallel_for(B1, threads, [&](std::size_t b) {
    RngStream rng1 = substream(seed, rng_domain::kBootstrap, b, 0);
    std::vector<double> ystar(n);
    for (std::size_t i = 0; i < n; ++i)
      ystar[i] = ghat_design[i] + resid.centered[rng1.next_below(n)];
    std::vector<double> gstar_grid = w_grid.apply(ystar);
    std::vector<double> gstar_design = w_design.apply(ystar);

    double* dev_row = ens.dev.data() + b * ng;
    std::vector<double> ub(ng);
    for (std::size_t j = 0; j < ng; ++j) {
      dev_row[j] = (gstar_grid[j] - est.ghat[j]) / est.scale[j];
      ub[j] = -dev_row[j];
    }

    std::vector<double> resid2(n);
    double mean2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid2[i] = ystar[i] - gstar_design[i];
      mean2 += resid2[i];
    }
    mean2 /= static_cast<double>(n);
    for (double& r : resid2) r -= mean2;

    std::uint32_t* lo_row = m_lo.data() + b * ng;
    std::uint32_t* hi_row = m_hi.data() + b * ng;
    std::vector<double> y2(n);
    for (std::size_t c = 0; c < B2; ++c) {
      RngStream rng2 = substream(seed, rng_domain::kSecondLevel, b, c);
      for (std::size_t i = 0; i < n; ++i)
        y2[i] = gstar_design[i] + resid2[rng2.next_below(n)];
      std::vector<double> g2 = w_grid.apply(y2);
      for (std::size_t j = 0; j < ng; ++j) {
        double v = (g2[j] - gstar_grid[j]) / est.scale[j];
        if (v <= ub[j]) ++lo_row[j];
        if (v >= ub[j]) ++hi_row[j];
      }
    }
  });

  // Attainable nominal levels: every alpha at which either tail rank changes.
  std::vector<double> cand;
  cand.reserve(2 * B2);
  const double denom = static_cast<double>(B2 + 1);
  for (std::size_t k = 1; k <= B2; ++k) {
    double a1 = 2.0 * static_cast<double>(k) / denom;
    if (a1 > 0.0 && a1 < 1.0) cand.push_back(a1);
    double a2 = 2.0 * (1.0 - static_cast<double>(k) / denom);
    if (a2 > 0.0 && a2 < 1.0) cand.push_back(a2);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const double fallback = 1.0 / denom;

  auto pi_at = [&](std::size_t j, double alpha) {
    const std::uint32_t rlo = static_cast<std::uint32_t>(quantile_rank(0.5 * alpha, B2));
    const std::uint32_t rhi_need =
        static_cast<std::uint32_t>(B2 - quantile_rank(1.0 - 0.5 * alpha, B2) + 1);
    std::size_t hits = 0;
    for (std::size_t b = 0; b < B1; ++b)
      if (m_lo[b * ng + j] >= rlo && m_hi[b * ng + j] >= rhi_need) ++hits;
    return static_cast<double>(hits) / static_cast<double>(B1);
  };

  CalibrationProfile profile;
  profile.grid = est.grid;
  profile.alpha0 = alpha0;
  profile.xi = xi;
  profile.beta_hat.resize(ng);
  const double target = 1.0 - alpha0;
  for (std::size_t j = 0; j < ng; ++j) {
    double beta = fallback;
    if (!cand.empty() && pi_at(j, cand.front()) >= target) {
      // pi_hat is nonincreasing in alpha, so the largest admissible level is
      // found by bisection over the candidate grid.
      std::size_t lo = 0, hi = cand.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (pi_at(j, cand[mid]) >= target)
          lo = mid;
        else
          hi = mid - 1;
      }
      beta = cand[lo];
    }
    profile.beta_hat[j] = beta;
  }

  // xi-quantile over grid points: rank ceil(xi * ng) clamped to [1, ng] of
  // the ascending beta_hat values, matching the studentized calibration path.
  std::vector<double> sorted = profile.beta_hat;
  std::sort(sorted.begin(), sorted.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(xi * static_cast<double>(ng)));
  if (rank < 1) rank = 1;
  if (rank > ng) rank = ng;
  profile.alpha_hat_xi = sorted[rank - 1];

  DoubleBootstrapResult out;
  out.profile = profile;
  out.band = build_percentile_band(est, ens, profile.alpha_hat_xi);
  return out;
}

}  // namespace bandforge
