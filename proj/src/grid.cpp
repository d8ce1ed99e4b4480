#include "phasespace/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phasespace/errors.hpp"

namespace phasespace {

double UniformGrid::extent() const { return std::max(std::abs(minimum), std::abs(maximum())); }

void UniformGrid::validate(std::size_t min_count) const {
  if (count < min_count) {
    throw InvalidInput("grid needs at least " + std::to_string(min_count) + " points, got " + std::to_string(count));
  }
  if (!std::isfinite(minimum) || !std::isfinite(step) || !(step > 0.0)) {
    throw InvalidInput("grid minimum and step must be finite with step > 0");
  }
}

UniformGrid centered_grid(std::size_t count, double step) {
  return UniformGrid{count, -static_cast<double>(count / 2) * step, step};
}

}  // namespace phasespace
