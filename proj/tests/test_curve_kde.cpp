#include <cmath>
#include <vector>

#include "bandforge/curve.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/kde.hpp"
#include "bandforge/kernels.hpp"
#include "bandforge/rng.hpp"
#include "doctest.h"

using namespace bandforge;

TEST_CASE("uniform grid spans the interval with exact endpoints") {
  std::vector<double> g = make_grid(-0.9, 0.9, 91);
  REQUIRE(g.size() == 91);
  CHECK(g.front() == -0.9);
  CHECK(g.back() == 0.9);
  CHECK(g[45] == doctest::Approx(0.0).epsilon(1e-15));
  for (std::size_t j = 1; j < g.size(); ++j)
    CHECK(g[j] - g[j - 1] == doctest::Approx(0.02).epsilon(1e-12));
  std::vector<double> one = make_grid(2.5, 3.5, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 2.5);
}

TEST_CASE("density estimate hand value on two points") {
  // K((0.5-0)/1) and K((0.5-1)/1) are both 0.75*(1-0.25) = 0.5625
  std::vector<double> f =
      kde({0.0, 1.0}, 1.0, Kernel::epanechnikov(), {0.5, 5.0});
  CHECK(f[0] == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(f[1] == 0.0);
}

TEST_CASE("density estimate integrates to one") {
  RngStream rng(6);
  std::vector<double> x(400);
  for (double& v : x) v = rng.next_normal();
  double h = silverman_bandwidth(x, Kernel::epanechnikov());
  // Riemann sum over a grid generously covering the sample
  std::vector<double> g = make_grid(-6.0, 6.0, 1201);
  std::vector<double> f = kde(x, h, Kernel::epanechnikov(), g);
  double mass = 0.0;
  for (double v : f) mass += v * 0.01;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rule-of-thumb bandwidth scales like the data") {
  RngStream rng(61);
  std::vector<double> x(200);
  for (double& v : x) v = rng.next_normal();
  Kernel k = Kernel::gaussian();
  double h = silverman_bandwidth(x, k);
  CHECK(h > 0.0);
  std::vector<double> x2(x);
  for (double& v : x2) v = 3.0 * v + 7.0;  // affine data -> 3x the bandwidth
  CHECK(silverman_bandwidth(x2, k) == doctest::Approx(3.0 * h).epsilon(1e-12));
}

TEST_CASE("rule-of-thumb bandwidth carries the kernel-equivalence factor") {
  RngStream rng(62);
  std::vector<double> x(150);
  for (double& v : x) v = rng.next_normal();
  double hg = silverman_bandwidth(x, Kernel::gaussian());
  double he = silverman_bandwidth(x, Kernel::epanechnikov());
  // (kappa/kappa2^2)^(1/5) ratio of the two kernels
  CHECK(he / hg == doctest::Approx(2.2138043588613394).epsilon(1e-12));
}

TEST_CASE("rule-of-thumb bandwidth survives degenerate spreads") {
  // point mass: spread falls back to 1
  std::vector<double> x(30, 2.0);
  CHECK(silverman_bandwidth(x, Kernel::gaussian()) ==
        doctest::Approx(0.9 * std::pow(30.0, -0.2)).epsilon(1e-12));
}

TEST_CASE("scale function arithmetic") {
  // sqrt(kappa / (n h f)) with kappa 0.6, n 100, h 0.2, f 0.5
  std::vector<double> s =
      scale_function(100, 0.2, Kernel::epanechnikov(), {0.5}, {0.0});
  CHECK(s[0] == doctest::Approx(0.24494897427831781).epsilon(1e-14));
}

TEST_CASE("scale function rejects vanishing design density") {
  CHECK_THROWS_AS(
      scale_function(100, 0.2, Kernel::epanechnikov(), {0.5, 0.0}, {0.0, 3.0}),
      ZeroDensity);
}

TEST_CASE("curve fit bundles fit, scale and noise estimates") {
  RngStream rng(414);
  Dataset d;
  for (int i = 0; i < 120; ++i) {
    d.x.push_back(2.0 * rng.next_unit() - 1.0);
    d.y.push_back(d.x.back() * d.x.back() + 0.3 * rng.next_normal());
  }
  std::vector<double> grid = make_grid(-0.8, 0.8, 17);
  CurveEstimate est = fit_curve(d, 0.3, Kernel::epanechnikov(), grid);
  REQUIRE(est.ghat.size() == grid.size());
  REQUIRE(est.scale.size() == grid.size());
  CHECK(est.bandwidth == 0.3);
  for (double s : est.scale) CHECK(s > 0.0);
  // rough fidelity to the parabola away from the boundary
  for (std::size_t j = 4; j + 4 < grid.size(); ++j)
    CHECK(std::fabs(est.ghat[j] - grid[j] * grid[j]) < 0.35);
  CHECK(est.sigma2hat > 0.05);
  CHECK(est.sigma2hat < 0.15);

  CurveEstimate est2 =
      fit_curve(d, 0.3, Kernel::epanechnikov(), grid, SigmaEstimator::kResidualMoment);
  // residual second moment includes smoothing bias, still same ballpark
  CHECK(est2.sigma2hat > 0.04);
  CHECK(est2.sigma2hat < 0.2);
}

TEST_CASE("curve fit refuses evaluation far outside the data") {
  Dataset d;
  for (int i = 0; i <= 20; ++i) {
    d.x.push_back(i * 0.05);
    d.y.push_back(0.0);
  }
  CHECK_THROWS_AS(
      fit_curve(d, 0.2, Kernel::epanechnikov(), {5.0}),
      EstimationError);
}
