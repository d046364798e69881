#include "bandforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bandforge/errors.hpp"

namespace bandforge {

void Dataset::validate() const {
  if (x.size() != y.size())
    throw InputError("dataset column lengths differ: " + std::to_string(x.size()) +
                     " x values vs " + std::to_string(y.size()) + " y values");
  if (x.size() < 3)
    throw InputError("dataset needs at least 3 rows, got " + std::to_string(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw InputError("non-finite value in dataset row " + std::to_string(i + 1));
  }
}

Dataset make_dataset(std::vector<double> x, std::vector<double> y) {
  Dataset d{std::move(x), std::move(y)};
  d.validate();
  return d;
}

std::vector<std::size_t> sort_order(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return idx;
}

}  // namespace bandforge
