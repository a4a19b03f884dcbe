#include "shotguard/reversal.hpp"

#include "shotguard/error.hpp"
#include "shotguard/imaging.hpp"

namespace shotguard {

void ReversalConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 255.0)) throw InvalidInput("gamma must lie in [0,255]");
}

NearWhiteMask near_white_mask(const GrayImage& gray, const ReversalConfig& cfg) {
  cfg.validate();
  NearWhiteMask mask{gray.width(), gray.height(), {}};
  mask.bits.reserve(gray.luminance().size());
  for (double y : gray.luminance()) mask.bits.push_back(y > cfg.gamma ? 1 : 0);
  return mask;
}

Screenshot reverse_contrast(const Screenshot& img, const GrayImage& gray,
                            const ReversalConfig& cfg, const kernels::KernelTable& k) {
  cfg.validate();
  if (gray.width() != img.width() || gray.height() != img.height()) {
    throw InvalidInput("luminance plane does not match screenshot dimensions");
  }
  std::vector<std::uint8_t> out(img.rgb().size());
  k.reverse_masked(img.rgb().data(), gray.luminance().data(), cfg.gamma, out.data(),
                   img.pixel_count());
  return Screenshot(img.width(), img.height(), std::move(out));
}

Screenshot reverse_contrast(const Screenshot& img, const ReversalConfig& cfg) {
  return reverse_contrast(img, to_grayscale(img), cfg);
}

}  // namespace shotguard
