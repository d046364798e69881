#include "bandforge/competing.hpp"

#include <string>

#include "bandforge/errors.hpp"
#include "bandforge/local_poly.hpp"

namespace bandforge {

namespace {

void check_config(const CompetitorConfig& config) {
  if (!(config.factor > 0.0 && config.factor <= 1.0))
    throw ConfigError("competitor factor must lie in (0, 1]");
  if (!(config.base_h > 0.0)) throw ConfigError("competitor base bandwidth must be positive");
}

}  // namespace

BandResult undersmooth_band(const Dataset& data, const CompetitorConfig& config,
                            const Kernel& kernel, const std::vector<double>& grid,
                            double alpha, SigmaEstimator sigma_est) {
  check_config(config);
  try {
    CurveEstimate est = fit_curve(data, config.factor * config.base_h, kernel, grid, sigma_est);
    return build_naive_band(est, alpha);
  } catch (const DegenerateWindow& e) {
    throw EstimationError(std::string(e.what()) + " (undersmoothing factor gamma=" +
                          std::to_string(config.factor) + ")");
  }
}

BandResult bias_corrected_band(const Dataset& data, const CompetitorConfig& config,
                               const Kernel& kernel, const std::vector<double>& grid,
                               double alpha, SigmaEstimator sigma_est) {
  check_config(config);
  const double h = config.base_h;
  CurveEstimate est = fit_curve(data, h, kernel, grid, sigma_est);
  std::vector<double> d2 = local_cubic_deriv2(data, h / config.factor, kernel, grid);

  BandResult band = build_naive_band(est, alpha);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double bias = 0.5 * kernel.kappa2 * h * h * d2[j];
    band.center[j] -= bias;
    band.lower[j] -= bias;
    band.upper[j] -= bias;
  }
  return band;
}

}  // namespace bandforge
