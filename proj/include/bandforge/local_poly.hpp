#pragma once

#include <cstddef>
#include <vector>

#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"

namespace bandforge {

// Row-major matrix of local-linear smoother weights: row j holds w[j][i] with
// ghat(grid[j]) = sum_i w[j][i] * y[i]. Weights depend only on the design
// points, the bandwidth, and the kernel, so one matrix serves every bootstrap
// refit on the same design (each refit is a matrix-vector product).
class WeightMatrix {
 public:
  WeightMatrix(std::size_t grid_size, std::size_t n)
      : grid_size_(grid_size), n_(n), w_(grid_size * n, 0.0) {}

  std::size_t grid_size() const { return grid_size_; }
  std::size_t n() const { return n_; }

  double* row(std::size_t j) { return w_.data() + j * n_; }
  const double* row(std::size_t j) const { return w_.data() + j * n_; }

  double apply_row(std::size_t j, const std::vector<double>& y) const {
    const double* r = row(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += r[i] * y[i];
    return acc;
  }

  std::vector<double> apply(const std::vector<double>& y) const {
    std::vector<double> out(grid_size_);
    for (std::size_t j = 0; j < grid_size_; ++j) out[j] = apply_row(j, y);
    return out;
  }

 private:
  std::size_t grid_size_, n_;
  std::vector<double> w_;
};

// Relative floor for the local-linear denominator S0*S2 - S1^2; below this
// (relative to S0*S2) the window is reported degenerate.
inline constexpr double kDenominatorFloor = 1e-12;

// Local linear weights at every grid point. Throws DegenerateWindow naming the
// first offending grid point.
WeightMatrix local_linear_weights(const std::vector<double>& x, double h,
                                  const Kernel& kernel,
                                  const std::vector<double>& grid);

// Local linear fit values on a grid (convenience wrapper over the weights).
std::vector<double> local_linear_fit(const Dataset& data, double h,
                                     const Kernel& kernel,
                                     const std::vector<double>& grid);

// Second-derivative estimate 2*b2 from a local cubic weighted fit at each grid
// point. Exact for polynomials up to degree 3 wherever the window spans enough
// distinct design points. Throws DegenerateWindow.
std::vector<double> local_cubic_deriv2(const Dataset& data, double h,
                                       const Kernel& kernel,
                                       const std::vector<double>& grid);

}  // namespace bandforge
