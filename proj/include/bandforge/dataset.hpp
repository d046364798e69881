#pragma once

#include <cstddef>
#include <vector>

namespace bandforge {

// Paired regression sample. Kept in input order; routines that need the
// x-sorted view (the difference-based variance estimator) sort internally.
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t n() const { return x.size(); }

  // Lengths equal, n >= 3, all values finite. Throws InputError.
  void validate() const;
};

Dataset make_dataset(std::vector<double> x, std::vector<double> y);

// Indices that put x in ascending order (stable, so ties keep input order).
std::vector<std::size_t> sort_order(const std::vector<double>& x);

}  // namespace bandforge
