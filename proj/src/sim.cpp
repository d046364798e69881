#include "bandforge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bandforge/bandwidth.hpp"
#include "bandforge/bootstrap.hpp"
#include "bandforge/competing.hpp"
#include "bandforge/curve.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/normal.hpp"
#include "bandforge/parallel.hpp"
#include "bandforge/percentile.hpp"
#include "bandforge/rng.hpp"

namespace bandforge {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double curvature_step() { return 1e-4; }

double central_second(int g_index, double x, double eps) {
  return (truth_value(g_index, x + eps) - 2.0 * truth_value(g_index, x) +
          truth_value(g_index, x - eps)) /
         (eps * eps);
}

struct RowSpec {
  StudyMethod method;
  double param;
};

std::vector<RowSpec> build_rows(const StudyConfig& cfg) {
  std::vector<RowSpec> rows;
  for (StudyMethod m : cfg.methods) {
    switch (m) {
      case StudyMethod::kCalibrated:
      case StudyMethod::kDoubleBootstrap:
        for (double xi : cfg.xi_list) rows.push_back({m, xi});
        break;
      case StudyMethod::kUndersmooth:
        for (double g : cfg.gamma_grid) rows.push_back({m, g});
        break;
      case StudyMethod::kBiasCorrect:
        for (double l : cfg.lambda_grid) rows.push_back({m, l});
        break;
    }
  }
  return rows;
}

}  // namespace

const char* method_name(StudyMethod m) {
  switch (m) {
    case StudyMethod::kCalibrated: return "calibrated";
    case StudyMethod::kUndersmooth: return "undersmooth";
    case StudyMethod::kBiasCorrect: return "biascorrect";
    case StudyMethod::kDoubleBootstrap: return "double_bootstrap";
  }
  return "unknown";
}

double truth_value(int g_index, double x) {
  switch (g_index) {
    case 1:
      return x + 5.0 * norm_pdf(10.0 * x);
    case 2:
      return std::sin(1.5 * 3.14159265358979323846 * x) /
             (1.0 + 18.0 * x * x * (sgn(x) + 1.0));
    case 3:
      return std::sin(0.5 * 3.14159265358979323846 * x) /
             (1.0 + 2.0 * x * x * (sgn(x) + 1.0));
    default:
      throw ConfigError("g_index must be 1, 2 or 3");
  }
}

double truth_deriv2(int g_index, double x) {
  if (g_index == 1) {
    // d^2/dx^2 [5 phi(10x)] = 500 (100 x^2 - 1) phi(10x); the linear part drops.
    return 500.0 * (100.0 * x * x - 1.0) * norm_pdf(10.0 * x);
  }
  if (g_index == 2 || g_index == 3) {
    const double eps = curvature_step();
    const double d1 = central_second(g_index, x, eps);
    const double d2 = central_second(g_index, x, 0.5 * eps);
    return (4.0 * d2 - d1) / 3.0;  // Richardson step, error O(eps^4)
  }
  throw ConfigError("g_index must be 1, 2 or 3");
}

void StudyConfig::validate() const {
  if (g_index < 1 || g_index > 3) throw ConfigError("g_index must be 1, 2 or 3");
  if (n < 3) throw ConfigError("n must be at least 3");
  if (bandwidth_rule == BandwidthRule::kPlugIn && n < 20)
    throw ConfigError("n must be at least 20 for the plug-in bandwidth rule");
  if (bandwidth_rule == BandwidthRule::kFixed && !(fixed_h > 0.0))
    throw ConfigError("fixed_h must be positive when the bandwidth rule is fixed");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
  if (n_sims == 0) throw ConfigError("n_sims must be positive");
  if (B == 0) throw ConfigError("B must be positive");
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw ConfigError("alpha0 must lie in (0, 1)");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (grid_size < 2) throw ConfigError("grid_size must be at least 2");
  if (!(region_a > -1.0 && region_b < 1.0 && region_a < region_b))
    throw ConfigError("region must satisfy -1 < a < b < 1");
  for (StudyMethod m : methods) {
    if (m == StudyMethod::kCalibrated || m == StudyMethod::kDoubleBootstrap) {
      if (xi_list.empty()) throw ConfigError("xi_list must not be empty");
      for (double xi : xi_list)
        if (!(xi > 0.0 && xi <= 0.5)) throw ConfigError("xi values must lie in (0, 0.5]");
    }
    if (m == StudyMethod::kUndersmooth) {
      if (gamma_grid.empty()) throw ConfigError("gamma_grid must not be empty");
      for (double g : gamma_grid)
        if (!(g > 0.0 && g <= 1.0)) throw ConfigError("gamma values must lie in (0, 1]");
    }
    if (m == StudyMethod::kBiasCorrect) {
      if (lambda_grid.empty()) throw ConfigError("lambda_grid must not be empty");
      for (double l : lambda_grid)
        if (!(l > 0.0 && l <= 1.0)) throw ConfigError("lambda values must lie in (0, 1]");
    }
    if (m == StudyMethod::kDoubleBootstrap && B2 == 0)
      throw ConfigError("B2 must be positive for the double bootstrap");
  }
}

Dataset generate_dataset(const StudyConfig& cfg, std::size_t study_index) {
  RngStream rng = substream(cfg.seed, rng_domain::kDataset, study_index);
  Dataset data;
  data.x.resize(cfg.n);
  data.y.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) data.x[i] = 2.0 * rng.next_unit() - 1.0;
  for (std::size_t i = 0; i < cfg.n; ++i)
    data.y[i] = truth_value(cfg.g_index, data.x[i]) + cfg.sigma * rng.next_normal();
  return data;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const std::vector<RowSpec> rows = build_rows(cfg);
  const std::size_t nrows = rows.size();
  const std::vector<double> grid = make_grid(cfg.region_a, cfg.region_b, cfg.grid_size);
  const std::size_t ng = grid.size();
  const Kernel kernel = [&] {
    switch (cfg.kernel) {
      case KernelId::kGaussian: return Kernel::gaussian();
      case KernelId::kBiweight: return Kernel::biweight();
      default: return Kernel::epanechnikov();
    }
  }();

  std::vector<double> truth(ng);
  for (std::size_t j = 0; j < ng; ++j) truth[j] = truth_value(cfg.g_index, grid[j]);

  // Per-sim storage, reduced sequentially afterwards so the aggregate is
  // independent of the parallel schedule.
  std::vector<std::uint8_t> covered(cfg.n_sims * nrows * ng, 0);
  std::vector<double> widths(cfg.n_sims * nrows, 0.0);
  std::vector<std::uint8_t> failed(cfg.n_sims, 0);
  std::vector<std::string> notes(cfg.n_sims);

  const unsigned threads = resolve_threads(cfg.threads);

  parallel_for(cfg.n_sims, threads, [&](std::size_t s) {
    try {
      Dataset data = generate_dataset(cfg, s);
      double h = cfg.fixed_h;
      if (cfg.bandwidth_rule == BandwidthRule::kPlugIn)
        h = plug_in_bandwidth(data, kernel).h;
      CurveEstimate est = fit_curve(data, h, kernel, grid, SigmaEstimator::kDifference);
      const std::uint64_t bseed = substream(cfg.seed, rng_domain::kStudy, s).next_u64();

      BootstrapEnsemble ens;
      bool have_ens = false;
      for (std::size_t r = 0; r < nrows; ++r) {
        std::vector<double> lower, upper;
        switch (rows[r].method) {
          case StudyMethod::kCalibrated: {
            if (!have_ens) {
              ens = make_residual_bootstrap(data, est, kernel, cfg.B, bseed,
                                            SigmaEstimator::kDifference, 1);
              have_ens = true;
            }
            CalibrationProfile prof = calibrate(ens, cfg.alpha0, rows[r].param);
            BandResult band = final_band(est, prof);
            lower = std::move(band.lower);
            upper = std::move(band.upper);
            break;
          }
          case StudyMethod::kDoubleBootstrap: {
            DoubleBootstrapResult res = double_bootstrap_calibrate(
                data, est, kernel, cfg.B, cfg.B2, cfg.alpha0, rows[r].param, bseed,
                false, 1);
            lower = std::move(res.band.lower);
            upper = std::move(res.band.upper);
            break;
          }
          case StudyMethod::kUndersmooth: {
            CompetitorConfig cc;
            cc.method = CompetitorConfig::Method::kUndersmooth;
            cc.factor = rows[r].param;
            cc.base_h = h;
            BandResult band = undersmooth_band(data, cc, kernel, grid, cfg.alpha0);
            lower = std::move(band.lower);
            upper = std::move(band.upper);
            break;
          }
          case StudyMethod::kBiasCorrect: {
            CompetitorConfig cc;
            cc.method = CompetitorConfig::Method::kBiasCorrect;
            cc.factor = rows[r].param;
            cc.base_h = h;
            BandResult band = bias_corrected_band(data, cc, kernel, grid, cfg.alpha0);
            lower = std::move(band.lower);
            upper = std::move(band.upper);
            break;
          }
        }
        std::uint8_t* cov = covered.data() + (s * nrows + r) * ng;
        double wsum = 0.0;
        for (std::size_t j = 0; j < ng; ++j) {
          cov[j] = (lower[j] <= truth[j] && truth[j] <= upper[j]) ? 1 : 0;
          wsum += upper[j] - lower[j];
        }
        widths[s * nrows + r] = wsum / static_cast<double>(ng);
      }
    } catch (const EstimationError& e) {
      failed[s] = 1;
      notes[s] = e.what();
    }
  });

  StudyResult out;
  out.grid = grid;
  for (std::size_t s = 0; s < cfg.n_sims; ++s)
    if (failed[s]) {
      ++out.n_failed;
      if (out.failure_notes.size() < 10) out.failure_notes.push_back(notes[s]);
    }
  out.n_done = cfg.n_sims - out.n_failed;
  if (out.n_failed * 20 > cfg.n_sims)
    throw EstimationError("study aborted: more than 5% of datasets failed (" +
                          std::to_string(out.n_failed) + " of " +
                          std::to_string(cfg.n_sims) + ")");
  if (out.n_done == 0) throw EstimationError("study aborted: every dataset failed");

  const double target = 1.0 - cfg.alpha0;
  out.rows.resize(nrows);
  for (std::size_t r = 0; r < nrows; ++r) {
    MethodResult& mr = out.rows[r];
    mr.method = rows[r].method;
    mr.method_name = method_name(rows[r].method);
    mr.factor_or_xi = rows[r].param;
    mr.coverage.assign(ng, 0.0);
    double wsum = 0.0;
    for (std::size_t s = 0; s < cfg.n_sims; ++s) {
      if (failed[s]) continue;
      const std::uint8_t* cov = covered.data() + (s * nrows + r) * ng;
      for (std::size_t j = 0; j < ng; ++j) mr.coverage[j] += cov[j];
      wsum += widths[s * nrows + r];
    }
    std::size_t hit = 0;
    double abs_err = 0.0;
    for (std::size_t j = 0; j < ng; ++j) {
      mr.coverage[j] /= static_cast<double>(out.n_done);
      // The 1e-12 slack only rescues exact rational ties (e.g. 190/200 vs
      // 1 - 0.05) from last-bit rounding; coverage values are spaced 1/n_done.
      if (mr.coverage[j] >= target - 1e-12) ++hit;
      abs_err += std::fabs(mr.coverage[j] - target);
    }
    mr.covered_proportion = static_cast<double>(hit) / static_cast<double>(ng);
    mr.avg_abs_cov_error = abs_err / static_cast<double>(ng);
    mr.avg_width = wsum / static_cast<double>(out.n_done);
  }

  // Mark the best covered_proportion within each competitor sweep (ties to
  // the first listed setting).
  for (StudyMethod m : {StudyMethod::kUndersmooth, StudyMethod::kBiasCorrect}) {
    std::size_t best = nrows;
    for (std::size_t r = 0; r < nrows; ++r) {
      if (out.rows[r].method != m) continue;
      if (best == nrows ||
          out.rows[r].covered_proportion > out.rows[best].covered_proportion)
        best = r;
    }
    if (best < nrows) out.rows[best].best_of_sweep = true;
  }

  // Sanity: the calibrated band can only widen as xi shrinks (lower quantile
  // of the same beta_hat profile). Checked with a 1-ulp-scale allowance for
  // the normal-quantile evaluation.
  for (std::size_t a = 0; a < nrows; ++a) {
    if (rows[a].method != StudyMethod::kCalibrated) continue;
    for (std::size_t b = 0; b < nrows; ++b) {
      if (rows[b].method != StudyMethod::kCalibrated) continue;
      if (rows[a].param < rows[b].param &&
          out.rows[a].avg_width < out.rows[b].avg_width * (1.0 - 1e-12))
        throw std::logic_error("calibrated band width failed to grow as xi decreased");
    }
  }
  return out;
}

std::vector<std::size_t> exceptional_set(const std::vector<double>& grid, int g_index,
                                         double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi must lie in (0, 1)");
  const std::size_t ng = grid.size();
  std::vector<std::pair<double, std::size_t>> mag;
  mag.reserve(ng);
  for (std::size_t j = 0; j < ng; ++j) {
    double m = std::fabs(truth_deriv2(g_index, grid[j]));
    if (m > 0.0) mag.emplace_back(m, j);
  }
  std::sort(mag.begin(), mag.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::size_t k = static_cast<std::size_t>(std::ceil(xi * static_cast<double>(ng)));
  if (k > mag.size()) k = mag.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = mag[i].second;
  std::sort(idx.begin(), idx.end());
  return idx;
}

TypicalBandReport typical_band(const StudyConfig& cfg, std::size_t n_candidates) {
  cfg.validate();
  if (n_candidates == 0) throw ConfigError("n_candidates must be positive");
  const std::vector<double> grid = make_grid(cfg.region_a, cfg.region_b, cfg.grid_size);
  const Kernel kernel = cfg.kernel == KernelId::kGaussian
                            ? Kernel::gaussian()
                            : (cfg.kernel == KernelId::kBiweight ? Kernel::biweight()
                                                                 : Kernel::epanechnikov());
  std::vector<std::pair<double, std::size_t>> ise;  // (ISE, candidate index)
  for (std::size_t c = 0; c < n_candidates; ++c) {
    try {
      Dataset data = generate_dataset(cfg, c);
      double h = cfg.fixed_h;
      if (cfg.bandwidth_rule == BandwidthRule::kPlugIn)
        h = plug_in_bandwidth(data, kernel).h;
      CurveEstimate est = fit_curve(data, h, kernel, grid);
      double sum = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double d = est.ghat[j] - truth_value(cfg.g_index, grid[j]);
        sum += d * d;
      }
      ise.emplace_back(sum / static_cast<double>(grid.size()), c);
    } catch (const EstimationError&) {
      // skipped candidates simply do not enter the median
    }
  }
  if (ise.empty()) throw EstimationError("typical-band report: every candidate failed");
  std::sort(ise.begin(), ise.end());
  const auto [med_ise, c] = ise[(ise.size() - 1) / 2];

  Dataset data = generate_dataset(cfg, c);
  double h = cfg.fixed_h;
  if (cfg.bandwidth_rule == BandwidthRule::kPlugIn) h = plug_in_bandwidth(data, kernel).h;
  CurveEstimate est = fit_curve(data, h, kernel, grid);
  const std::uint64_t bseed = substream(cfg.seed, rng_domain::kStudy, c).next_u64();
  BootstrapEnsemble ens = make_residual_bootstrap(data, est, kernel, cfg.B, bseed,
                                                  SigmaEstimator::kDifference,
                                                  resolve_threads(cfg.threads));
  CalibrationProfile prof = calibrate(ens, cfg.alpha0, cfg.xi_list.at(0));

  TypicalBandReport rep;
  rep.dataset_index = c;
  rep.ise = med_ise;
  rep.band = final_band(est, prof);
  rep.data = std::move(data);
  return rep;
}

}  // namespace bandforge
