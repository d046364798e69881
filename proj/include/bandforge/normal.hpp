#pragma once

namespace bandforge {

double norm_pdf(double x);

// Phi(x) and the upper tail 1 - Phi(x), both via erfc so the tails keep full
// relative precision.
double norm_cdf(double x);
double norm_sf(double x);

// Inverse standard normal CDF. Rational initial guess (absolute error below
// 1.2e-9) polished with two Halley steps against the erfc-based CDF, giving
// near machine precision over (0, 1). The initial guess is the widely ported
// 2003 Acklam-style approximation, chosen so that reimplementations in other
// languages can reproduce band envelopes bit-for-bit after the same polish.
double norm_quantile(double p);

// z such that P(|Z| <= z) = 1 - alpha, i.e. the upper alpha/2 point. Computed
// from the alpha/2 tail directly so tiny alpha keeps full precision.
// alpha = 1 gives exactly 0; alpha = 0 gives +infinity.
double critical_z(double alpha);

// 2 * (1 - Phi(t)) for t >= 0, the two-sided level whose critical value is t.
// erfc keeps precision for large t (no 1 - p cancellation).
double beta_from_t(double t);

}  // namespace bandforge
