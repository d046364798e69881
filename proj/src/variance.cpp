#include "bandforge/variance.hpp"

#include <algorithm>
#include <cmath>

#include "bandforge/local_poly.hpp"

namespace bandforge {

Residuals compute_residuals(const Dataset& data,
                            const std::vector<double>& ghat_at_design) {
  Residuals r;
  r.raw.resize(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) r.raw[i] = data.y[i] - ghat_at_design[i];
  double mean = 0.0;
  for (double v : r.raw) mean += v;
  mean /= static_cast<double>(r.raw.size());
  r.centered.resize(r.raw.size());
  for (std::size_t i = 0; i < r.raw.size(); ++i) r.centered[i] = r.raw[i] - mean;
  return r;
}

double difference_variance_sorted(const std::vector<double>& y_by_x) {
  const std::size_t n = y_by_x.size();
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double d = y_by_x[i] - y_by_x[i - 1];
    acc += d * d;
  }
  return acc / (2.0 * static_cast<double>(n - 1));
}

double difference_variance(const Dataset& data) {
  std::vector<std::size_t> idx = sort_order(data.x);
  std::vector<double> y_sorted(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) y_sorted[i] = data.y[idx[i]];
  return difference_variance_sorted(y_sorted);
}

double residual_moment_variance(const Residuals& resid) {
  double acc = 0.0;
  for (double e : resid.centered) acc += e * e;
  return acc / static_cast<double>(resid.centered.size());
}

std::vector<double> hetero_scale(const Dataset& data, const Residuals& resid,
                                 double h, const Kernel& kernel,
                                 const std::vector<double>& grid) {
  Dataset sq;
  sq.x = data.x;
  sq.y.resize(resid.centered.size());
  for (std::size_t i = 0; i < resid.centered.size(); ++i)
    sq.y[i] = resid.centered[i] * resid.centered[i];
  std::vector<double> smoothed = local_linear_fit(sq, h, kernel, grid);
  for (double& v : smoothed) v = std::sqrt(std::max(0.0, v));
  return smoothed;
}

}  // namespace bandforge
