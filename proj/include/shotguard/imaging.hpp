#pragma once

#include <cstddef>
#include <cstdint>

#include "shotguard/image.hpp"
#include "shotguard/kernels.hpp"

namespace shotguard {

/// Visual stability indicator: population variance of gradient magnitudes
/// over every pixel location, borders included.
struct VsiReport {
  double score = 0.0;
  double mean_magnitude = 0.0;
  double mean_square_magnitude = 0.0;
  std::size_t pixel_count = 0;
};

/// Zero-mean additive Gaussian perturbation, in 8-bit intensity units.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// BT.601 luminance, kept real-valued.
GrayImage to_grayscale(const Screenshot& img);
GrayImage to_grayscale(const Screenshot& img, const kernels::KernelTable& k);

/// Central differences inside, one-sided differences on the border rows and
/// columns. Throws InvalidInput for images thinner than 2 pixels.
GradientField gradient_field(const GrayImage& gray);
GradientField gradient_field(const GrayImage& gray, const kernels::KernelTable& k);

/// Single pass over the luminance plane; the gradient field is never stored.
VsiReport vsi_score(const GrayImage& gray);
VsiReport vsi_score(const GrayImage& gray, const kernels::KernelTable& k);
VsiReport vsi_score(const Screenshot& img);

/// Each channel gets independent N(0, sigma^2) noise, then round-to-nearest
/// and clamp to [0,255]. sigma == 0 returns the input unchanged. The output is
/// a pure function of (img, spec).
Screenshot add_gaussian_noise(const Screenshot& img, const NoiseSpec& spec);

}  // namespace shotguard
