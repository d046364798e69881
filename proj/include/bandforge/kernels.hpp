#pragma once

#include <string_view>

#include "bandforge/rng.hpp"

namespace bandforge {

enum class KernelId { kEpanechnikov, kGaussian, kBiweight };

// Second-order symmetric kernel with its two band-level constants:
//   kappa  = integral of K^2   (variance constant of the smoother)
//   kappa2 = integral of u^2 K (bias constant)
// Values are exact: 3/5 and 1/5 (Epanechnikov), 1/(2*sqrt(pi)) and 1
// (Gaussian), 5/7 and 1/7 (biweight).
struct Kernel {
  KernelId id;
  double support;  // half-width of the support; infinity for the Gaussian
  double kappa;
  double kappa2;

  double operator()(double u) const;

  // Draw one variate with density K. Registered for the Gaussian (normal
  // draw) and the Epanechnikov (median of three uniforms on (-1,1), which has
  // density 3(1-u^2)/4). Throws UnsamplableKernel otherwise.
  bool samplable() const;
  double sample(RngStream& rng) const;

  const char* name() const;

  static Kernel epanechnikov();
  static Kernel gaussian();
  static Kernel biweight();
  static Kernel from_name(std::string_view name);  // throws ConfigError
};

}  // namespace bandforge
