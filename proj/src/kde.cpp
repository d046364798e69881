#include "bandforge/kde.hpp"

#include <algorithm>
#include <cmath>

namespace bandforge {

std::vector<double> kde(const std::vector<double>& sample, double h,
                        const Kernel& kernel, const std::vector<double>& grid) {
  const double n = static_cast<double>(sample.size());
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (double xi : sample) acc += kernel((grid[j] - xi) / h);
    out[j] = acc / (n * h);
  }
  return out;
}

double silverman_bandwidth(const std::vector<double>& sample, const Kernel& kernel) {
  const std::size_t n = sample.size();
  std::vector<double> s(sample);
  std::sort(s.begin(), s.end());

  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  auto quantile = [&s](double p) {
    double pos = p * static_cast<double>(s.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= s.size()) return s.back();
    double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[lo + 1] - s[lo]);
  };
  double iqr = quantile(0.75) - quantile(0.25);

  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  if (!(spread > 0.0)) {
    double range = s.back() - s.front();
    spread = range > 0.0 ? range : 1.0;
  }

  // Canonical rescale: (kappa/kappa2^2)^{1/5} for this kernel over the same
  // for the Gaussian, so the rule delivers equivalent smoothing for any kernel.
  const double gauss_delta = std::pow(0.28209479177387814, 0.2);
  double delta = std::pow(kernel.kappa / (kernel.kappa2 * kernel.kappa2), 0.2);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2) * (delta / gauss_delta);
}

}  // namespace bandforge
