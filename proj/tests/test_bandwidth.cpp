#include <cmath>
#include <cstdint>
#include <vector>

#include "bandforge/bandwidth.hpp"
#include "bandforge/curve.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/local_poly.hpp"
#include "bandforge/rng.hpp"
#include "bandforge/sim.hpp"
#include "doctest.h"

using namespace bandforge;

namespace {

// Conditional mean integrated squared error of the local linear fit at h,
// given the design and the true curve: squared smoothing bias of the truth
// plus sigma^2 times the summed squared weights, averaged over the grid.
double conditional_mise(const Dataset& d, double h, const Kernel& k,
                        const std::vector<double>& grid, int g_index, double sigma2) {
  WeightMatrix w = local_linear_weights(d.x, h, k, grid);
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double* row = w.row(j);
    double mean = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
      mean += row[i] * truth_value(g_index, d.x[i]);
      s2 += row[i] * row[i];
    }
    double bias = mean - truth_value(g_index, grid[j]);
    acc += bias * bias + sigma2 * s2;
  }
  return acc / static_cast<double>(grid.size());
}

Dataset bumpy_benchmark_draw() {
  StudyConfig cfg;
  cfg.g_index = 1;
  cfg.n = 100;
  cfg.sigma = 1.0;
  cfg.seed = 4242;
  return generate_dataset(cfg, 0);
}

}  // namespace

TEST_CASE("plug-in bandwidth lands near the risk-minimizing one") {
  // one pinned draw of the bumpy benchmark curve with unit noise; the
  // brute-force risk scan below is the reference
  Dataset d = bumpy_benchmark_draw();
  Kernel k = Kernel::epanechnikov();
  BandwidthResult bw = plug_in_bandwidth(d, k);
  CHECK(bw.method == "plugin");
  CHECK(bw.h > 0.03);
  CHECK(bw.h < 0.30);
  CHECK(bw.diagnostics.at("fallback") == 0.0);

  std::vector<double> grid = make_grid(-0.9, 0.9, 91);
  double best_h = -1.0, best = 0.0;
  for (int i = 0; i < 40; ++i) {
    double h = 0.03 * std::pow(1.1, i);
    double mise;
    try {
      mise = conditional_mise(d, h, k, grid, 1, 1.0);
    } catch (const EstimationError&) {
      continue;
    }
    if (best_h < 0.0 || mise < best) {
      best_h = h;
      best = mise;
    }
  }
  REQUIRE(best_h > 0.0);
  CHECK(bw.h / best_h > 0.5);
  CHECK(bw.h / best_h < 2.0);
}

TEST_CASE("plug-in bandwidth is invariant under scaling of y") {
  Dataset d = bumpy_benchmark_draw();
  Kernel k = Kernel::epanechnikov();
  double h1 = plug_in_bandwidth(d, k).h;
  Dataset s = d;
  for (double& v : s.y) v *= 37.0;
  // noise and curvature functionals scale together, h is untouched
  CHECK(plug_in_bandwidth(s, k).h == doctest::Approx(h1).epsilon(1e-12));
}

TEST_CASE("plug-in bandwidth tracks the x scale") {
  Dataset d = bumpy_benchmark_draw();
  Kernel k = Kernel::epanechnikov();
  double h1 = plug_in_bandwidth(d, k).h;
  Dataset s = d;
  for (double& v : s.x) v *= 2.0;
  CHECK(plug_in_bandwidth(s, k).h == doctest::Approx(2.0 * h1).epsilon(1e-10));
}

TEST_CASE("plug-in bandwidth falls back on noiseless affine data") {
  Dataset d;
  RngStream rng(5150);
  for (int i = 0; i < 60; ++i) {
    d.x.push_back(rng.next_unit());
    d.y.push_back(2.0 * d.x.back() - 1.0);
  }
  BandwidthResult bw = plug_in_bandwidth(d, Kernel::epanechnikov());
  CHECK(bw.diagnostics.at("fallback") == 1.0);
  double range = 0.0;
  {
    double lo = d.x[0], hi = d.x[0];
    for (double v : d.x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    range = hi - lo;
  }
  CHECK(bw.h == doctest::Approx(range * std::pow(60.0, -0.2)).epsilon(1e-12));
}

TEST_CASE("plug-in bandwidth needs twenty points and a spread design") {
  Dataset tiny;
  for (int i = 0; i < 10; ++i) {
    tiny.x.push_back(i);
    tiny.y.push_back(i % 3);
  }
  CHECK_THROWS_AS(plug_in_bandwidth(tiny, Kernel::epanechnikov()), ConfigError);

  Dataset flat;
  for (int i = 0; i < 25; ++i) {
    flat.x.push_back(1.0);
    flat.y.push_back(i);
  }
  CHECK_THROWS_AS(plug_in_bandwidth(flat, Kernel::epanechnikov()), ConfigError);
}

TEST_CASE("cross-validation score equals the leave-one-out sum") {
  RngStream rng(2024);
  Dataset d;
  for (int i = 0; i < 40; ++i) {
    d.x.push_back(2.0 * rng.next_unit() - 1.0);
    d.y.push_back(std::sin(3.0 * d.x.back()) + 0.4 * rng.next_normal());
  }
  Kernel k = Kernel::epanechnikov();
  std::vector<double> grid = {0.3, 0.5, 0.8};
  BandwidthResult bw = cv_bandwidth(d, k, grid);

  // independent leave-one-out recomputation via the hat-diagonal identity
  double best = 0.0;
  double best_h = 0.0;
  bool first = true;
  for (double h : grid) {
    WeightMatrix w = local_linear_weights(d.x, h, k, d.x);
    double cv = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
      double wii = w.row(i)[i];
      double loo = (w.apply_row(i, d.y) - wii * d.y[i]) / (1.0 - wii);
      cv += (d.y[i] - loo) * (d.y[i] - loo);
    }
    if (first || cv < best) {
      best = cv;
      best_h = h;
      first = false;
    }
  }
  CHECK(bw.h == best_h);
  CHECK(bw.diagnostics.at("cv_min") == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("cross-validation skips degenerate candidates instead of failing") {
  Dataset d;
  for (int i = 0; i < 30; ++i) {
    d.x.push_back(0.1 * i);
    d.y.push_back(std::cos(i));
  }
  // 0.01 leaves single-point windows everywhere, 1.0 works
  BandwidthResult bw = cv_bandwidth(d, Kernel::epanechnikov(), {0.01, 1.0});
  CHECK(bw.h == 1.0);
  CHECK(bw.diagnostics.at("skipped") == 1.0);
  CHECK_THROWS_AS(cv_bandwidth(d, Kernel::epanechnikov(), {0.01, 0.02}),
                  AllDegenerate);
  CHECK_THROWS_AS(cv_bandwidth(d, Kernel::epanechnikov(), {}), ConfigError);
}

TEST_CASE("cross-validation ties resolve to the smaller bandwidth") {
  // exactly affine data: every admissible bandwidth interpolates, so all
  // scores agree at round-off level and the smallest candidate wins
  Dataset d;
  for (int i = 0; i < 30; ++i) {
    d.x.push_back(0.1 * i);
    d.y.push_back(3.0 + 2.0 * d.x.back());
  }
  BandwidthResult bw = cv_bandwidth(d, Kernel::epanechnikov(), {2.0, 0.9, 1.4});
  CHECK(bw.h == 0.9);
}
