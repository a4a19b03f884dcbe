#include "shotguard/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "shotguard/error.hpp"

namespace shotguard {
namespace {

void require_gradient_shape(std::size_t width, std::size_t height) {
  if (width < 2 || height < 2) {
    throw InvalidInput("gradient needs at least 2 pixels per axis, got " +
                       std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

GrayImage to_grayscale(const Screenshot& img, const kernels::KernelTable& k) {
  std::vector<double> lum(img.pixel_count());
  k.luminance(img.rgb().data(), lum.data(), lum.size());
  return GrayImage(img.width(), img.height(), std::move(lum));
}

GrayImage to_grayscale(const Screenshot& img) { return to_grayscale(img, kernels::active()); }

GradientField gradient_field(const GrayImage& gray, const kernels::KernelTable& k) {
  require_gradient_shape(gray.width(), gray.height());
  GradientField field{gray.width(), gray.height(),
                      std::vector<double>(gray.width() * gray.height())};
  k.gradient_magnitudes(gray.luminance().data(), gray.width(), gray.height(),
                        field.magnitudes.data());
  return field;
}

GradientField gradient_field(const GrayImage& gray) {
  return gradient_field(gray, kernels::active());
}

VsiReport vsi_score(const GrayImage& gray, const kernels::KernelTable& k) {
  require_gradient_shape(gray.width(), gray.height());
  const auto m = k.gradient_moments(gray.luminance().data(), gray.width(), gray.height());
  const double n = static_cast<double>(m.count);
  VsiReport r;
  r.pixel_count = m.count;
  r.mean_magnitude = m.sum / n;
  r.mean_square_magnitude = m.sum_sq / n;
  // Rounding can leave a tiny negative residue when every magnitude is equal.
  r.score = std::max(0.0, r.mean_square_magnitude - r.mean_magnitude * r.mean_magnitude);
  return r;
}

VsiReport vsi_score(const GrayImage& gray) { return vsi_score(gray, kernels::active()); }

VsiReport vsi_score(const Screenshot& img) { return vsi_score(to_grayscale(img)); }

Screenshot add_gaussian_noise(const Screenshot& img, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw InvalidInput("noise sigma must be finite and >= 0");
  }
  if (spec.sigma == 0.0) return img;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::vector<std::uint8_t> out(img.rgb().begin(), img.rgb().end());
  for (auto& c : out) {
    const double v = std::round(static_cast<double>(c) + noise(rng));
    c = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return Screenshot(img.width(), img.height(), std::move(out));
}

}  // namespace shotguard
