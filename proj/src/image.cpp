#include "shotguard/image.hpp"

#include <string>

#include "shotguard/error.hpp"

namespace shotguard {

Screenshot::Screenshot(std::size_t width, std::size_t height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 2 || height < 2) {
    throw InvalidInput("screenshot must be at least 2x2, got " + std::to_string(width) + "x" +
                       std::to_string(height));
  }
  if (rgb_.size() != width * height * 3) {
    throw InvalidInput("screenshot buffer holds " + std::to_string(rgb_.size()) +
                       " bytes, expected " + std::to_string(width * height * 3));
  }
}

Screenshot Screenshot::filled(std::size_t width, std::size_t height, std::uint8_t r,
                              std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> rgb(width * height * 3);
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
  return Screenshot(width, height, std::move(rgb));
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> luminance)
    : width_(width), height_(height), luminance_(std::move(luminance)) {
  if (luminance_.size() != width * height) {
    throw InvalidInput("luminance plane size does not match " + std::to_string(width) + "x" +
                       std::to_string(height));
  }
  for (double y : luminance_) {
    if (!(y >= 0.0 && y <= 255.0)) throw InvalidInput("luminance outside [0,255]");
  }
}

}  // namespace shotguard
