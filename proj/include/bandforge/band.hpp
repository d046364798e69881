#pragma once

#include <vector>

#include "bandforge/curve.hpp"

namespace bandforge {

// Pointwise confidence band: center(x) +/- (or quantile-asymmetric) envelope
// evaluated on the fit grid. alpha is the nominal pointwise level the band was
// built at (after calibration this is the calibrated level, not alpha0).
struct BandResult {
  std::vector<double> grid;
  std::vector<double> center;
  std::vector<double> lower;
  std::vector<double> upper;
  double alpha = 0.0;
};

// Symmetric normal-theory band ghat(x) +/- s(x) * sigmahat * z_{1-alpha/2}.
BandResult build_naive_band(const CurveEstimate& est, double alpha);

// Heteroscedastic variant: the constant noise scale is replaced by the
// conditional-sd estimate on the grid, half-width s(x) * sigma(x) * z.
BandResult build_hetero_band(const CurveEstimate& est,
                             const std::vector<double>& sigma_grid, double alpha);

// Limiting pointwise coverage of a nominal (1-alpha) symmetric band whose
// center is off by b standard errors: Phi(z + b) - Phi(-z + b).
double asymptotic_coverage(double b, double alpha);

}  // namespace bandforge
