#pragma once

#include <stdexcept>
#include <string>

namespace bandforge {

// Base class for numerical failures during estimation. Callers that run many
// datasets (the Monte Carlo harness) catch this to count and skip bad draws.
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

// Local fit normal equations are singular at some evaluation point, typically
// because the kernel window holds fewer distinct x values than the fit needs.
class DegenerateWindow : public EstimationError {
 public:
  DegenerateWindow(const std::string& what, double at) : EstimationError(what), x(at) {}
  double x;
};

// A density value underflowed the positivity floor where a positive value is required.
class ZeroDensity : public EstimationError {
 public:
  ZeroDensity(const std::string& what, double at) : EstimationError(what), x(at) {}
  double x;
};

// Every candidate bandwidth in a selection grid failed.
class AllDegenerate : public EstimationError {
 public:
  explicit AllDegenerate(const std::string& what) : EstimationError(what) {}
};

// A conditional standard deviation is (numerically) zero at a design point
// whose residual is not, so standardized residuals cannot be formed.
class ZeroScale : public EstimationError {
 public:
  ZeroScale(const std::string& what, double at) : EstimationError(what), x(at) {}
  double x;
};

// Kernel has no registered sampling routine (needed by the smoothed bootstrap).
class UnsamplableKernel : public EstimationError {
 public:
  explicit UnsamplableKernel(const std::string& what) : EstimationError(what) {}
};

// Invalid user-facing configuration (CLI flags or config file). Exit code 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (CSV parse/validation). Exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bandforge
