#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shotguard {

/// Owned RGB raster, row-major, three 8-bit channels per pixel.
///
/// Construction validates that the buffer holds exactly width*height*3
/// bytes and that both dimensions are at least 2.
class Screenshot {
 public:
  Screenshot(std::size_t width, std::size_t height, std::vector<std::uint8_t> rgb);

  // Uniformly filled raster.
  static Screenshot filled(std::size_t width, std::size_t height, std::uint8_t r,
                           std::uint8_t g, std::uint8_t b);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }

  std::span<const std::uint8_t> rgb() const noexcept { return rgb_; }
  std::span<std::uint8_t> mutable_rgb() noexcept { return rgb_; }

  const std::uint8_t* pixel(std::size_t x, std::size_t y) const noexcept {
    return rgb_.data() + (y * width_ + x) * 3;
  }
  std::uint8_t* pixel(std::size_t x, std::size_t y) noexcept {
    return rgb_.data() + (y * width_ + x) * 3;
  }
  void set_pixel(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) noexcept {
    auto* p = pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  friend bool operator==(const Screenshot&, const Screenshot&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> rgb_;
};

/// Real-valued luminance plane in [0,255], same dimensions as its source.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::vector<double> luminance);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::span<const double> luminance() const noexcept { return luminance_; }
  double at(std::size_t x, std::size_t y) const noexcept { return luminance_[y * width_ + x]; }
  const double* row(std::size_t y) const noexcept { return luminance_.data() + y * width_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> luminance_;
};

/// Per-pixel gradient magnitudes.
struct GradientField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> magnitudes;

  double at(std::size_t x, std::size_t y) const noexcept { return magnitudes[y * width + x]; }
};

}  // namespace shotguard
