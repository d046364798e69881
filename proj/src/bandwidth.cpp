#include "bandforge/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandforge/errors.hpp"
#include "bandforge/local_poly.hpp"

namespace bandforge {

namespace {

// Relative floors deciding when a pilot quantity is indistinguishable from
// zero (scale-free: compared against var(y)/range^4 resp. var(y)).
constexpr double kPilotFloor = 1e-14;
constexpr double kLeverageFloor = 1e-10;

struct BlockFit {
  double rss = 0.0;
  double sum_curv2 = 0.0;   // sum of squared fitted second derivatives
  double sum_curv24 = 0.0;  // sum of fitted second * fourth derivatives
};

// Moments of the equivalent kernel that a cubic fit applies when it reads off
// a second derivative; they set the pilot bandwidth for the curvature
// re-estimate. Everything comes from plain Simpson quadrature so any stored
// kernel works.
struct CurvPilotConstant {
  double value;  // [30 R(K*2) / mu4(K*2)]^(1/7)
};

CurvPilotConstant curv_pilot_constant(const Kernel& kernel) {
  const double cut = std::min(kernel.support, 10.0);
  const int steps = 2000;  // even
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  const double dt = 2.0 * cut / steps;
  auto weight = [&](int i) { return (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  for (int i = 0; i <= steps; ++i) {
    double t = -cut + i * dt;
    double k = kernel(t) * weight(i);
    double t2 = t * t;
    m0 += k;
    m2 += k * t2;
    m4 += k * t2 * t2;
    m6 += k * t2 * t2 * t2;
  }
  double mu2 = m2 / m0, mu4 = m4 / m0, mu6 = m6 / m0;
  double i0 = 0;
  for (int i = 0; i <= steps; ++i) {
    double t = -cut + i * dt;
    double k = kernel(t);
    double d = t * t - mu2;
    i0 += d * d * k * k * weight(i);
  }
  i0 *= dt / 3.0;
  const double det = mu4 - mu2 * mu2;
  const double r_star = 4.0 * i0 / (det * det);
  const double mu4_star = 2.0 * (mu6 - mu2 * mu4) / det;
  return {std::pow(30.0 * r_star / mu4_star, 1.0 / 7.0)};
}

// Quartic least squares on the points [lo, hi) of the x-sorted sample, in a
// centered and scaled abscissa for conditioning.
BlockFit quartic_block_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                           std::size_t lo, std::size_t hi) {
  const std::size_t m = hi - lo;
  double c = 0.0;
  for (std::size_t i = lo; i < hi; ++i) c += xs[i];
  c /= static_cast<double>(m);
  double w = 0.0;
  for (std::size_t i = lo; i < hi; ++i) w = std::max(w, std::fabs(xs[i] - c));
  if (w == 0.0) w = 1.0;

  double mom[9] = {};
  double rhs[5] = {};
  for (std::size_t i = lo; i < hi; ++i) {
    double t = (xs[i] - c) / w;
    double tp = 1.0;
    for (int p = 0; p <= 8; ++p) {
      mom[p] += tp;
      if (p < 5) rhs[p] += tp * ys[i];
      tp *= t;
    }
  }

  double a[5][5], l[5][5] = {};
  for (int r = 0; r < 5; ++r)
    for (int cc = 0; cc < 5; ++cc) a[r][cc] = mom[r + cc];
  for (int r = 0; r < 5; ++r) {
    for (int cc = 0; cc <= r; ++cc) {
      double s = a[r][cc];
      for (int p = 0; p < cc; ++p) s -= l[r][p] * l[cc][p];
      if (r == cc) {
        if (!(s > 1e-13 * a[r][r]))
          throw DegenerateWindow("quartic pilot block is rank deficient", xs[lo]);
        l[r][r] = std::sqrt(s);
      } else {
        l[r][cc] = s / l[cc][cc];
      }
    }
  }
  double z[5], g[5];
  for (int r = 0; r < 5; ++r) {
    double s = rhs[r];
    for (int p = 0; p < r; ++p) s -= l[r][p] * z[p];
    z[r] = s / l[r][r];
  }
  for (int r = 4; r >= 0; --r) {
    double s = z[r];
    for (int p = r + 1; p < 5; ++p) s -= l[p][r] * g[p];
    g[r] = s / l[r][r];
  }

  BlockFit out;
  for (std::size_t i = lo; i < hi; ++i) {
    double t = (xs[i] - c) / w;
    double fit = ((g[4] * t + g[3]) * t + g[2]) * t * t + g[1] * t + g[0];
    double r = ys[i] - fit;
    out.rss += r * r;
    double curv = (2.0 * g[2] + 6.0 * g[3] * t + 12.0 * g[4] * t * t) / (w * w);
    double curv4 = 24.0 * g[4] / (w * w * w * w);
    out.sum_curv2 += curv * curv;
    out.sum_curv24 += curv * curv4;
  }
  return out;
}

}  // namespace

BandwidthResult plug_in_bandwidth(const Dataset& data, const Kernel& kernel) {
  const std::size_t n = data.n();
  if (n < 20) throw ConfigError("plug-in bandwidth needs n >= 20");

  std::vector<std::size_t> idx = sort_order(data.x);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = data.x[idx[i]];
    ys[i] = data.y[idx[i]];
  }
  const double range = xs.back() - xs.front();
  if (!(range > 0.0)) throw ConfigError("all design points coincide");

  // Stage one: candidate pilots use 1..N_max equal-count quartic blocks; the
  // count is picked by Mallows' Cp (each extra block buys 5 parameters).
  // Always taking N_max lets the 20-point quartics chase noise, inflating
  // theta22 by orders of magnitude and starving h, so the penalty matters.
  const std::size_t max_blocks = std::max<std::size_t>(1, std::min<std::size_t>(5, n / 20));
  std::vector<double> rss_n(max_blocks + 1, 0.0), curv2_n(max_blocks + 1, 0.0);
  std::vector<double> curv24_n(max_blocks + 1, 0.0);
  std::vector<bool> ok_n(max_blocks + 1, false);
  std::size_t largest_ok = 0;
  for (std::size_t nb = 1; nb <= max_blocks; ++nb) {
    try {
      double rss = 0.0, curv2 = 0.0, curv24 = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        std::size_t lo = b * n / nb;
        std::size_t hi = (b + 1) * n / nb;
        BlockFit f = quartic_block_fit(xs, ys, lo, hi);
        rss += f.rss;
        curv2 += f.sum_curv2;
        curv24 += f.sum_curv24;
      }
      rss_n[nb] = rss;
      curv2_n[nb] = curv2;
      curv24_n[nb] = curv24;
      ok_n[nb] = true;
      largest_ok = nb;
    } catch (const DegenerateWindow&) {
      // rank-deficient block (duplicated abscissae); this candidate is out
    }
  }
  if (largest_ok == 0)
    throw DegenerateWindow("quartic pilot is rank deficient at every block count", xs.front());

  const double cp_denom =
      rss_n[largest_ok] / static_cast<double>(n - 5 * largest_ok);
  std::size_t blocks = 0;
  if (!(cp_denom > 0.0)) {
    // interpolating pilot: Cp is 0/0, any candidate leads to the no-noise
    // fallback below, so take the smallest admissible one
    for (std::size_t nb = 1; nb <= max_blocks; ++nb)
      if (ok_n[nb]) {
        blocks = nb;
        break;
      }
  } else {
    double best_cp = 0.0;
    for (std::size_t nb = 1; nb <= max_blocks; ++nb) {
      if (!ok_n[nb]) continue;
      double cp = rss_n[nb] / cp_denom -
                  (static_cast<double>(n) - 10.0 * static_cast<double>(nb));
      if (blocks == 0 || cp < best_cp) {
        blocks = nb;
        best_cp = cp;
      }
    }
  }
  const double sigma2 = rss_n[blocks] / static_cast<double>(n);
  const double theta22_block = curv2_n[blocks] / static_cast<double>(n);
  const double theta24_block = curv24_n[blocks] / static_cast<double>(n);

  double ymean = 0.0;
  for (double v : ys) ymean += v;
  ymean /= static_cast<double>(n);
  double yvar = 0.0;
  for (double v : ys) yvar += (v - ymean) * (v - ymean);
  yvar /= static_cast<double>(n);

  BandwidthResult out;
  out.method = "plugin";
  out.diagnostics["blocks"] = static_cast<double>(blocks);
  out.diagnostics["blocks_max"] = static_cast<double>(max_blocks);
  out.diagnostics["sigma2"] = sigma2;
  out.diagnostics["theta22_block"] = theta22_block;

  const double r4 = range * range * range * range;
  const double n_d = static_cast<double>(n);
  const bool no_curvature = !(theta22_block > kPilotFloor * yvar / r4);
  const bool no_noise = !(sigma2 > kPilotFloor * yvar);
  if (no_curvature || no_noise) {
    out.h = range * std::pow(n_d, -0.2);
    out.diagnostics["fallback"] = 1.0;
    return out;
  }

  // Stage two: the raw block curvature is a poor plug-in target (too noisy
  // with many blocks, oversmoothed with one), so re-estimate the curvature
  // functional with a cubic fit at its own asymptotically tuned bandwidth and
  // feed that into h. Falls back to the block value if the cubic degenerates.
  double theta22 = theta22_block;
  double lambda =
      curv_pilot_constant(kernel).value *
      std::pow(sigma2 * range / (n_d * std::fabs(theta24_block)), 1.0 / 7.0);
  // occupancy floor: a cubic window should expect ~20 points, else its
  // curvature is noise and h collapses; the floor fades as ~1/n against the
  // pilot's n^(-1/7) rate so it only bites in small samples
  lambda = std::max(lambda, 10.0 * range / n_d);
  // rate cap: when the blocked curvature signal is weak the formula drifts
  // toward window widths fit for the regression itself, where the pilot
  // stops undersmoothing and the selected h loses its bias guard; clamp to a
  // constant multiple of the pilot-optimal n^(-1/7) scale
  const double lambda_cap = 0.45 * range * std::pow(n_d, -1.0 / 7.0);
  if (!std::isfinite(lambda) || lambda > lambda_cap) lambda = lambda_cap;
  out.diagnostics["lambda"] = lambda;
  // average the squared curvature only over design points clear of the
  // boundary: one-sided cubic windows there spike by orders of magnitude and
  // a single spike would own the whole mean
  std::vector<double> interior;
  interior.reserve(n);
  for (double x : xs)
    if (x >= xs.front() + 0.05 * range && x <= xs.back() - 0.05 * range)
      interior.push_back(x);
  try {
    if (interior.empty()) throw DegenerateWindow("no interior design points", xs.front());
    std::vector<double> d2 = local_cubic_deriv2(data, lambda, kernel, interior);
    double acc = 0.0;
    for (double v : d2) acc += v * v;
    theta22 = acc / static_cast<double>(interior.size());
    out.diagnostics["second_stage"] = 1.0;
  } catch (const EstimationError&) {
    out.diagnostics["second_stage"] = 0.0;
  }
  out.diagnostics["theta22"] = theta22;
  if (!(theta22 > kPilotFloor * yvar / r4)) {
    out.h = range * std::pow(n_d, -0.2);
    out.diagnostics["fallback"] = 1.0;
    return out;
  }

  const double ck = kernel.kappa / (kernel.kappa2 * kernel.kappa2);
  out.h = std::pow(ck * sigma2 * range / (n_d * theta22), 0.2);
  out.diagnostics["fallback"] = 0.0;
  return out;
}

BandwidthResult cv_bandwidth(const Dataset& data, const Kernel& kernel,
                             const std::vector<double>& h_grid) {
  if (h_grid.empty()) throw ConfigError("cross-validation needs a nonempty bandwidth grid");
  const std::size_t n = data.n();

  std::vector<double> grid(h_grid);
  std::sort(grid.begin(), grid.end());

  double ss_y = 0.0;
  for (double v : data.y) ss_y += v * v;
  // Candidates whose scores differ by less than this are treated as tied, so
  // exactly-interpolating fits (all scores at round-off level) resolve to the
  // smallest bandwidth rather than to round-off noise.
  const double tie_eps = 1e-9 * ss_y;

  BandwidthResult out;
  out.method = "cv";
  bool found = false;
  double best = 0.0;
  std::size_t skipped = 0;

  for (double h : grid) {
    double cv = 0.0;
    bool admissible = true;
    try {
      WeightMatrix w = local_linear_weights(data.x, h, kernel, data.x);
      for (std::size_t i = 0; i < n && admissible; ++i) {
        double ghat = w.apply_row(i, data.y);
        double wii = w.row(i)[i];
        if (!(1.0 - wii > kLeverageFloor)) {
          admissible = false;
          break;
        }
        double loo = (ghat - wii * data.y[i]) / (1.0 - wii);
        double e = data.y[i] - loo;
        cv += e * e;
      }
    } catch (const DegenerateWindow&) {
      admissible = false;
    }
    if (!admissible) {
      ++skipped;
      continue;
    }
    if (!found || cv < best - tie_eps) {
      found = true;
      best = cv;
      out.h = h;
    }
  }
  if (!found)
    throw AllDegenerate("every candidate bandwidth is degenerate at some design point");
  out.diagnostics["cv_min"] = best;
  out.diagnostics["skipped"] = static_cast<double>(skipped);
  return out;
}

}  // namespace bandforge
