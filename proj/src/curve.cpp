#include "bandforge/curve.hpp"

#include <cmath>
#include <string>

#include "bandforge/errors.hpp"
#include "bandforge/kde.hpp"
#include "bandforge/local_poly.hpp"

namespace bandforge {

std::vector<double> scale_function(std::size_t n, double h, const Kernel& kernel,
                                   const std::vector<double>& fhat_x,
                                   const std::vector<double>& grid) {
  std::vector<double> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(fhat_x[j] > kDensityFloor))
      throw ZeroDensity("design density vanishes at x = " + std::to_string(grid[j]) +
                            " (grid point outside the data range?)",
                        grid[j]);
    s[j] = std::sqrt(kernel.kappa / (static_cast<double>(n) * h * fhat_x[j]));
  }
  return s;
}

CurveEstimate fit_curve(const Dataset& data, double h, const Kernel& kernel,
                        const std::vector<double>& grid, SigmaEstimator sigma_est) {
  CurveEstimate est;
  est.grid = grid;
  est.bandwidth = h;
  est.ghat = local_linear_fit(data, h, kernel, grid);

  double h1 = silverman_bandwidth(data.x, kernel);
  std::vector<double> fx = kde(data.x, h1, kernel, grid);
  est.scale = scale_function(data.n(), h, kernel, fx, grid);

  if (sigma_est == SigmaEstimator::kDifference) {
    est.sigma2hat = difference_variance(data);
  } else {
    std::vector<double> at_design = local_linear_fit(data, h, kernel, data.x);
    est.sigma2hat = residual_moment_variance(compute_residuals(data, at_design));
  }
  return est;
}

std::vector<double> make_grid(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = a;
    return g;
  }
  double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) g[j] = a + step * static_cast<double>(j);
  g[n - 1] = b;
  return g;
}

}  // namespace bandforge
