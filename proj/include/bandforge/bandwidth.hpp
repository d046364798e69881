#pragma once

#include <map>
#include <string>
#include <vector>

#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"

namespace bandforge {

struct BandwidthResult {
  double h = 0.0;
  std::string method;
  // Pilot quantities and fallback flags, keyed by name ("theta22", "sigma2",
  // "blocks", "fallback", "cv_min", ...). Purely informational.
  std::map<std::string, double> diagnostics;
};

// Direct plug-in rule for the local-linear fit:
//   h = [ C(K) * sigma2 * |range| / (n * theta22) ]^{1/5},  C(K) = kappa/kappa2^2.
// Two-stage pilot: (a) blockwise quartic least squares on N equal-count
// x-sorted blocks, N <= max(1, min(5, n/20)) picked by Mallows' Cp, gives
// sigma2 and rough curvature functionals; (b) those set a pilot bandwidth
// lambda for a local cubic fit whose squared second derivative, averaged over
// the interior design points (5% of the range trimmed at each end), is
// theta22. lambda is kept between an occupancy floor of 10*range/n and a cap
// of 0.45*range*n^{-1/7}. Near-zero pilot curvature or noise falls back to
// h = |range| * n^{-1/5} and sets diagnostics["fallback"] = 1. Needs n >= 20.
BandwidthResult plug_in_bandwidth(const Dataset& data, const Kernel& kernel);

// Leave-one-out cross-validation over a candidate grid: minimizes the summed
// squared prediction error, skipping candidates that are degenerate at any
// design point; ties resolve to the smallest bandwidth. Throws AllDegenerate
// if no candidate survives.
BandwidthResult cv_bandwidth(const Dataset& data, const Kernel& kernel,
                             const std::vector<double>& h_grid);

}  // namespace bandforge
