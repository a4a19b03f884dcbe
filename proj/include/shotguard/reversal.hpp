#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shotguard/image.hpp"
#include "shotguard/kernels.hpp"

namespace shotguard {

struct ReversalConfig {
  // Luminance above which a pixel counts as near-white (strict inequality).
  double gamma = 240.0;

  // Throws InvalidInput unless 0 <= gamma <= 255.
  void validate() const;
};

struct NearWhiteMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;  // 1 where Y > gamma

  bool at(std::size_t x, std::size_t y) const noexcept { return bits[y * width + x] != 0; }
  friend bool operator==(const NearWhiteMask&, const NearWhiteMask&) = default;
};

NearWhiteMask near_white_mask(const GrayImage& gray, const ReversalConfig& cfg = {});

/// Selective polarity reversal: every channel of a near-white pixel becomes
/// 255 - c, all other pixels pass through. Not an involution: the mask of the
/// output differs from the mask of the input, so never apply it twice.
Screenshot reverse_contrast(const Screenshot& img, const ReversalConfig& cfg = {});
Screenshot reverse_contrast(const Screenshot& img, const GrayImage& gray,
                            const ReversalConfig& cfg,
                            const kernels::KernelTable& k = kernels::active());

}  // namespace shotguard
