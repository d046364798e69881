#include "bandforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandforge/errors.hpp"
#include "bandforge/normal.hpp"

namespace bandforge {

double Kernel::operator()(double u) const {
  switch (id) {
    case KernelId::kEpanechnikov:
      return std::fabs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelId::kGaussian:
      return norm_pdf(u);
    case KernelId::kBiweight: {
      if (std::fabs(u) >= 1.0) return 0.0;
      double t = 1.0 - u * u;
      return 0.9375 * t * t;
    }
  }
  return 0.0;
}

bool Kernel::samplable() const {
  return id == KernelId::kGaussian || id == KernelId::kEpanechnikov;
}

double Kernel::sample(RngStream& rng) const {
  switch (id) {
    case KernelId::kGaussian:
      return rng.next_normal();
    case KernelId::kEpanechnikov: {
      double a = 2.0 * rng.next_unit() - 1.0;
      double b = 2.0 * rng.next_unit() - 1.0;
      double c = 2.0 * rng.next_unit() - 1.0;
      // median of three
      return std::max(std::min(a, b), std::min(std::max(a, b), c));
    }
    default:
      throw UnsamplableKernel(std::string("no sampler registered for kernel ") + name());
  }
}

const char* Kernel::name() const {
  switch (id) {
    case KernelId::kEpanechnikov:
      return "epanechnikov";
    case KernelId::kGaussian:
      return "gaussian";
    case KernelId::kBiweight:
      return "biweight";
  }
  return "?";
}

Kernel Kernel::epanechnikov() { return {KernelId::kEpanechnikov, 1.0, 0.6, 0.2}; }

Kernel Kernel::gaussian() {
  return {KernelId::kGaussian, std::numeric_limits<double>::infinity(),
          0.28209479177387814, 1.0};
}

Kernel Kernel::biweight() {
  return {KernelId::kBiweight, 1.0, 5.0 / 7.0, 1.0 / 7.0};
}

Kernel Kernel::from_name(std::string_view name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "gaussian") return gaussian();
  if (name == "biweight") return biweight();
  throw ConfigError("unknown kernel '" + std::string(name) +
                    "' (choices: epanechnikov, gaussian, biweight)");
}

}  // namespace bandforge
