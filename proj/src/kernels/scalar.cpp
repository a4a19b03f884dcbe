#include "shotguard/kernels.hpp"

#include "gradient_row.hpp"

namespace shotguard::kernels {
namespace {

void luminance(const std::uint8_t* rgb, double* out, std::size_t pixels) {
  for (std::size_t i = 0; i < pixels; ++i) {
    const int num = 299 * rgb[3 * i] + 587 * rgb[3 * i + 1] + 114 * rgb[3 * i + 2];
    out[i] = static_cast<double>(num) / 1000.0;
  }
}

GradientMoments gradient_moments(const double* gray, std::size_t width, std::size_t height) {
  GradientMoments m;
  for (std::size_t y = 0; y < height; ++y) {
    detail::scalar_row(gray, width, height, y, [&](std::size_t, double mag) {
      m.sum += mag;
      m.sum_sq += mag * mag;
    });
  }
  m.count = width * height;
  return m;
}

void gradient_magnitudes(const double* gray, std::size_t width, std::size_t height,
                         double* out) {
  for (std::size_t y = 0; y < height; ++y) {
    double* dst = out + y * width;
    detail::scalar_row(gray, width, height, y,
                       [dst](std::size_t x, double mag) { dst[x] = mag; });
  }
}

std::size_t reverse_masked(const std::uint8_t* rgb, const double* gray, double gamma,
                           std::uint8_t* out, std::size_t pixels) {
  std::size_t masked = 0;
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint8_t flip = gray[i] > gamma ? 0xFF : 0x00;
    masked += flip & 1u;
    out[3 * i] = rgb[3 * i] ^ flip;
    out[3 * i + 1] = rgb[3 * i + 1] ^ flip;
    out[3 * i + 2] = rgb[3 * i + 2] ^ flip;
  }
  return masked;
}

void batch_dot(const double* templates, std::size_t count, std::size_t stride,
               const double* vec, std::size_t length, double* scores) {
  for (std::size_t t = 0; t < count; ++t) {
    const double* row = templates + t * stride;
    double acc = 0.0;
    for (std::size_t i = 0; i < length; ++i) acc += row[i] * vec[i];
    scores[t] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar,   &luminance,      &gradient_moments,
                                 &gradient_magnitudes, &reverse_masked, &batch_dot};
  return table;
}

}  // namespace shotguard::kernels
