#pragma once

#include <cstddef>

namespace phasespace {

/// Uniform 1D grid: points minimum + k * step for k in [0, count).
struct UniformGrid {
  std::size_t count = 0;
  double minimum = 0.0;
  double step = 1.0;

  double point(std::size_t k) const { return minimum + static_cast<double>(k) * step; }
  double maximum() const { return point(count - 1); }
  /// max |x| over the grid.
  double extent() const;

  /// Throws InvalidInput unless count >= min_count and minimum/step are
  /// finite with step > 0.
  void validate(std::size_t min_count = 1) const;

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

/// Grid with `count` points centred on zero (point count/2 is exactly 0 for
/// even counts).
UniformGrid centered_grid(std::size_t count, double step);

/// Minimum point count for any grid that feeds a transform.
inline constexpr std::size_t kMinTransformCount = 8;

}  // namespace phasespace
