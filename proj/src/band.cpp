#include "bandforge/band.hpp"

#include <cmath>

#include "bandforge/errors.hpp"
#include "bandforge/normal.hpp"

namespace bandforge {

BandResult build_naive_band(const CurveEstimate& est, double alpha) {
  // alpha = 1 is allowed and collapses the band to its center (z = 0); the
  // calibration path reaches it when every bootstrap deviation is zero.
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw ConfigError("band level alpha must lie in (0,1]");
  BandResult band;
  band.grid = est.grid;
  band.center = est.ghat;
  band.alpha = alpha;
  const double z = critical_z(alpha);
  const double sigma = std::sqrt(est.sigma2hat);
  band.lower.resize(est.grid.size());
  band.upper.resize(est.grid.size());
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    double half = est.scale[j] * sigma * z;
    band.lower[j] = est.ghat[j] - half;
    band.upper[j] = est.ghat[j] + half;
  }
  return band;
}

BandResult build_hetero_band(const CurveEstimate& est,
                             const std::vector<double>& sigma_grid, double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw ConfigError("band level alpha must lie in (0,1]");
  if (sigma_grid.size() != est.grid.size())
    throw ConfigError("sigma_grid length must match the fit grid");
  BandResult band;
  band.grid = est.grid;
  band.center = est.ghat;
  band.alpha = alpha;
  const double z = critical_z(alpha);
  band.lower.resize(est.grid.size());
  band.upper.resize(est.grid.size());
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    double half = est.scale[j] * sigma_grid[j] * z;
    band.lower[j] = est.ghat[j] - half;
    band.upper[j] = est.ghat[j] + half;
  }
  return band;
}

double asymptotic_coverage(double b, double alpha) {
  double z = critical_z(alpha);
  return norm_cdf(z + b) - norm_cdf(-z + b);
}

}  // namespace bandforge
