#pragma once

#include <cmath>
#include <cstddef>

namespace shotguard::kernels::detail {

// Rows feeding the vertical difference for row y, and its scale
// (0.5 for a central difference, 1 for a one-sided one).
struct VerticalStencil {
  const double* up;
  const double* down;
  double scale;
};

inline VerticalStencil vertical_stencil(const double* gray, std::size_t width,
                                        std::size_t height, std::size_t y) noexcept {
  if (y == 0) return {gray, gray + width, 1.0};
  if (y + 1 == height) return {gray + (y - 1) * width, gray + y * width, 1.0};
  return {gray + (y - 1) * width, gray + (y + 1) * width, 0.5};
}

inline double horizontal_diff(const double* row, std::size_t width, std::size_t x) noexcept {
  if (x == 0) return row[1] - row[0];
  if (x + 1 == width) return row[x] - row[x - 1];
  return 0.5 * (row[x + 1] - row[x - 1]);
}

// Calls sink(x, magnitude) for every pixel of row y in increasing x.
template <typename Sink>
inline void scalar_row(const double* gray, std::size_t width, std::size_t height,
                       std::size_t y, Sink&& sink) {
  const double* row = gray + y * width;
  const VerticalStencil v = vertical_stencil(gray, width, height, y);
  for (std::size_t x = 0; x < width; ++x) {
    const double gx = horizontal_diff(row, width, x);
    const double gy = v.scale * (v.down[x] - v.up[x]);
    sink(x, std::sqrt(gx * gx + gy * gy));
  }
}

}  // namespace shotguard::kernels::detail
