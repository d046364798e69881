#include "bandforge/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandforge/errors.hpp"
#include "bandforge/local_poly.hpp"
#include "bandforge/normal.hpp"
#include "bandforge/parallel.hpp"
#include "bandforge/rng.hpp"

namespace bandforge {

namespace {

// Sentinel for a positive deviation over a zero scale estimate: larger than
// any usable critical value, still finite so order statistics stay well defined.
constexpr double kHugeT = 1e300;

// Relative slack in the step-function comparison T <= z. The critical value
// recovered from a level that was itself derived from a T order statistic can
// round a few ulps below that statistic; the slack absorbs the round trip so
// rank identities (pi_hat at beta_hat, etc.) hold exactly.
constexpr double kStepSlack = 1e-12;

double studentized(double num, double denom) {
  if (denom > 0.0) return std::fabs(num) / denom;
  return std::fabs(num) == 0.0 ? 0.0 : kHugeT;
}

int max_refit_attempts() { return 3; }

}  // namespace

BootstrapEnsemble make_residual_bootstrap(const Dataset& data, const CurveEstimate& est,
                                          const Kernel& kernel, std::size_t B,
                                          std::uint64_t seed, SigmaEstimator sigma_est,
                                          unsigned threads) {
  const std::size_t n = data.n();
  const std::size_t ng = est.grid.size();

  WeightMatrix w_grid = local_linear_weights(data.x, est.bandwidth, kernel, est.grid);
  WeightMatrix w_design = local_linear_weights(data.x, est.bandwidth, kernel, data.x);
  std::vector<double> ghat_design = w_design.apply(data.y);
  Residuals resid = compute_residuals(data, ghat_design);
  std::vector<std::size_t> order = sort_order(data.x);

  BootstrapEnsemble ens;
  ens.B = B;
  ens.grid = est.grid;
  ens.seed = seed;
  ens.tstat.assign(B * ng, 0.0);
  ens.sigma2star.assign(B, 0.0);

  parallel_for(B, threads, [&](std::size_t b) {
    std::vector<double> ystar(n), sorted(n);
    for (int attempt = 0;; ++attempt) {
      RngStream rng = substream(seed, rng_domain::kBootstrap, b,
                                static_cast<std::uint64_t>(attempt));
      for (std::size_t i = 0; i < n; ++i)
        ystar[i] = ghat_design[i] + resid.centered[rng.next_below(n)];
      try {
        double sigma2;
        if (sigma_est == SigmaEstimator::kDifference) {
          for (std::size_t i = 0; i < n; ++i) sorted[i] = ystar[order[i]];
          sigma2 = difference_variance_sorted(sorted);
        } else {
          std::vector<double> refit_design = w_design.apply(ystar);
          Dataset tmp{data.x, ystar};
          sigma2 = residual_moment_variance(compute_residuals(tmp, refit_design));
        }
        double sigma_star = std::sqrt(sigma2);
        double* row = ens.tstat.data() + b * ng;
        for (std::size_t j = 0; j < ng; ++j) {
          double gh_star = w_grid.apply_row(j, ystar);
          row[j] = studentized(gh_star - est.ghat[j], est.scale[j] * sigma_star);
        }
        ens.sigma2star[b] = sigma2;
        break;
      } catch (const DegenerateWindow&) {
        if (attempt + 1 >= max_refit_attempts()) throw;
      }
    }
  });
  return ens;
}

BootstrapEnsemble make_hetero_bootstrap(const Dataset& data, const CurveEstimate& est,
                                        const Kernel& kernel,
                                        const std::vector<double>& sigma_design,
                                        const std::vector<double>& sigma_grid,
                                        std::size_t B, std::uint64_t seed,
                                        unsigned threads) {
  const std::size_t n = data.n();
  const std::size_t ng = est.grid.size();
  if (sigma_design.size() != n)
    throw ConfigError("sigma_design length must match the sample size");
  if (sigma_grid.size() != ng)
    throw ConfigError("sigma_grid length must match the fit grid");

  WeightMatrix w_grid = local_linear_weights(data.x, est.bandwidth, kernel, est.grid);
  WeightMatrix w_design = local_linear_weights(data.x, est.bandwidth, kernel, data.x);
  std::vector<double> ghat_design = w_design.apply(data.y);
  Residuals resid = compute_residuals(data, ghat_design);

  // Standardize the raw residuals, then re-center the standardized pool (this
  // order makes a constant sigma cancel exactly against the multiplication in
  // the resample below).
  std::vector<double> pool(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma_design[i] > 0.0) {
      pool[i] = resid.raw[i] / sigma_design[i];
    } else if (std::fabs(resid.raw[i]) <= 1e-300) {
      pool[i] = 0.0;
    } else {
      throw ZeroScale("conditional sd vanishes at x = " + std::to_string(data.x[i]) +
                          " but the residual there is nonzero",
                      data.x[i]);
    }
  }
  double pool_mean = 0.0;
  for (double v : pool) pool_mean += v;
  pool_mean /= static_cast<double>(n);
  for (double& v : pool) v -= pool_mean;

  // Root-mean-square of adjacent conditional sds along the x-sorted sample,
  // used to put first differences of the resample on the standardized scale.
  std::vector<std::size_t> order = sort_order(data.x);
  std::vector<double> pair_scale(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double a = sigma_design[order[i]], b2 = sigma_design[order[i - 1]];
    pair_scale[i] = std::sqrt((a * a + b2 * b2) / 2.0);
  }

  BootstrapEnsemble ens;
  ens.B = B;
  ens.grid = est.grid;
  ens.seed = seed;
  ens.tstat.assign(B * ng, 0.0);
  ens.sigma2star.assign(B, 0.0);

  parallel_for(B, threads, [&](std::size_t b) {
    std::vector<double> ystar(n);
    for (int attempt = 0;; ++attempt) {
      RngStream rng = substream(seed, rng_domain::kBootstrap, b,
                                static_cast<std::uint64_t>(attempt));
      for (std::size_t i = 0; i < n; ++i)
        ystar[i] = ghat_design[i] + sigma_design[i] * pool[rng.next_below(n)];
      try {
        double acc = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
          double d = ystar[order[i]] - ystar[order[i - 1]];
          if (pair_scale[i] > 0.0) {
            d /= pair_scale[i];
          } else if (d != 0.0) {
            d = kHugeT;
          }
          acc += d * d;
        }
        double rho2 = acc / (2.0 * static_cast<double>(n - 1));
        double rho = std::sqrt(rho2);
        double* row = ens.tstat.data() + b * ng;
        for (std::size_t j = 0; j < ng; ++j) {
          double gh_star = w_grid.apply_row(j, ystar);
          row[j] = studentized(gh_star - est.ghat[j],
                               (est.scale[j] * sigma_grid[j]) * rho);
        }
        ens.sigma2star[b] = rho2;
        break;
      } catch (const DegenerateWindow&) {
        if (attempt + 1 >= max_refit_attempts()) throw;
      }
    }
  });
  return ens;
}

double pi_hat(const BootstrapEnsemble& ens, std::size_t j, double alpha) {
  const double thr = critical_z(alpha) * (1.0 + kStepSlack);
  std::size_t count = 0;
  for (std::size_t b = 0; b < ens.B; ++b)
    if (ens.t(b, j) <= thr) ++count;
  return static_cast<double>(count) / static_cast<double>(ens.B);
}

double beta_hat(const BootstrapEnsemble& ens, std::size_t j, double alpha0) {
  const std::size_t B = ens.B;
  std::vector<double> col(B);
  for (std::size_t b = 0; b < B; ++b) col[b] = ens.t(b, j);
  double rank_real = std::ceil((1.0 - alpha0) * static_cast<double>(B + 1));
  std::size_t rank = static_cast<std::size_t>(
      std::min(static_cast<double>(B), std::max(1.0, rank_real)));
  std::nth_element(col.begin(), col.begin() + (rank - 1), col.end());
  double q = col[rank - 1];
  double beta = beta_from_t(q);
  // Keep the level strictly positive even when q is huge (erfc underflow).
  return std::max(beta, std::numeric_limits<double>::min());
}

CalibrationProfile calibrate(const BootstrapEnsemble& ens, double alpha0, double xi) {
  if (!(alpha0 > 0.0) || !(alpha0 < 1.0))
    throw ConfigError("alpha0 must lie in (0,1)");
  if (!(xi > 0.0) || !(xi <= 0.5)) throw ConfigError("xi must lie in (0, 0.5]");

  CalibrationProfile prof;
  prof.grid = ens.grid;
  prof.alpha0 = alpha0;
  prof.xi = xi;
  const std::size_t ng = ens.grid.size();
  prof.beta_hat.resize(ng);
  for (std::size_t j = 0; j < ng; ++j) prof.beta_hat[j] = beta_hat(ens, j, alpha0);

  std::vector<double> sorted(prof.beta_hat);
  std::sort(sorted.begin(), sorted.end());
  double rank_real = std::ceil(xi * static_cast<double>(ng));
  std::size_t rank = static_cast<std::size_t>(
      std::min(static_cast<double>(ng), std::max(1.0, rank_real)));
  prof.alpha_hat_xi = sorted[rank - 1];
  return prof;
}

BandResult final_band(const CurveEstimate& est, const CalibrationProfile& profile) {
  return build_naive_band(est, profile.alpha_hat_xi);
}

}  // namespace bandforge
