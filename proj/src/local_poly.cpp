#include "bandforge/local_poly.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bandforge/errors.hpp"

namespace bandforge {

namespace {

[[noreturn]] void throw_degenerate(double at) {
  throw DegenerateWindow(
      "degenerate kernel window at x = " + std::to_string(at) +
          " (too few distinct design points in range; increase the bandwidth)",
      at);
}

}  // namespace

WeightMatrix local_linear_weights(const std::vector<double>& x, double h,
                                  const Kernel& kernel,
                                  const std::vector<double>& grid) {
  const std::size_t n = x.size();
  WeightMatrix w(grid.size(), n);
  std::vector<double> k(n), u(n);

  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double xj = grid[j];
    // The 1/h kernel normalization cancels between numerator and denominator
    // of the weights, so raw K values are used throughout.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = (xj - x[i]) / h;
      k[i] = kernel(u[i]);
      s0 += k[i];
      s1 += u[i] * k[i];
      s2 += u[i] * u[i] * k[i];
    }
    const double den = s0 * s2 - s1 * s1;
    if (!(den > kDenominatorFloor * s0 * s2)) throw_degenerate(xj);
    double* row = w.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = (s2 - u[i] * s1) * k[i] / den;
    }
  }
  return w;
}

std::vector<double> local_linear_fit(const Dataset& data, double h,
                                     const Kernel& kernel,
                                     const std::vector<double>& grid) {
  return local_linear_weights(data.x, h, kernel, grid).apply(data.y);
}

std::vector<double> local_cubic_deriv2(const Dataset& data, double h,
                                       const Kernel& kernel,
                                       const std::vector<double>& grid) {
  const std::size_t n = data.n();
  std::vector<double> out(grid.size());

  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double xj = grid[j];
    // Weighted cubic fit in the scaled variable t = (x - xj)/h; the curvature
    // coefficient converts back as g'' = 2*c2/h^2.
    std::array<double, 7> m{};  // moments sum K * t^p, p = 0..6
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < n; ++i) {
      double t = (data.x[i] - xj) / h;
      double k = kernel(t);
      if (k == 0.0) continue;
      double tp = k;
      for (int p = 0; p <= 6; ++p) {
        m[p] += tp;
        if (p < 4) v[p] += tp * data.y[i];
        tp *= t;
      }
    }

    // Cholesky on the 4x4 Gram matrix of {1, t, t^2, t^3}.
    double a[4][4];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a[r][c] = m[r + c];
    double l[4][4] = {};
    bool ok = true;
    for (int r = 0; r < 4 && ok; ++r) {
      for (int c = 0; c <= r; ++c) {
        double s = a[r][c];
        for (int p = 0; p < c; ++p) s -= l[r][p] * l[c][p];
        if (r == c) {
          if (!(s > kDenominatorFloor * a[r][r])) {
            ok = false;
            break;
          }
          l[r][r] = std::sqrt(s);
        } else {
          l[r][c] = s / l[c][c];
        }
      }
    }
    if (!ok) throw_degenerate(xj);

    // Solve L z = v, then L^T c = z; only c2 is needed.
    double z[4], c[4];
    for (int r = 0; r < 4; ++r) {
      double s = v[r];
      for (int p = 0; p < r; ++p) s -= l[r][p] * z[p];
      z[r] = s / l[r][r];
    }
    for (int r = 3; r >= 0; --r) {
      double s = z[r];
      for (int p = r + 1; p < 4; ++p) s -= l[p][r] * c[p];
      c[r] = s / l[r][r];
    }
    out[j] = 2.0 * c[2] / (h * h);
  }
  return out;
}

}  // namespace bandforge
