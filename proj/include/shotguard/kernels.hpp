#pragma once

// Data-parallel inner loops behind imaging, reversal and the glyph engine.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from CPUID; setting
// SHOTGUARD_ISA=scalar forces the reference path. The scalar and AVX2 tables
// are both always reachable through kernel_table(Isa) so tests can compare
// them directly.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace shotguard::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

// Sum and sum of squares of per-pixel gradient magnitudes.
struct GradientMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

struct KernelTable {
  Isa isa;

  // Y = (299 R + 587 G + 114 B) / 1000 for `pixels` interleaved RGB triples.
  // The integer numerator is exact, so every variant is bit-identical.
  void (*luminance)(const std::uint8_t* rgb, double* out, std::size_t pixels);

  // Central differences inside, one-sided at the borders, accumulated in a
  // single pass without materializing the field. Requires width, height >= 2.
  GradientMoments (*gradient_moments)(const double* gray, std::size_t width,
                                      std::size_t height);

  // Same stencil as gradient_moments, writing magnitudes to `out`.
  void (*gradient_magnitudes)(const double* gray, std::size_t width, std::size_t height,
                              double* out);

  // out = in XOR 0xFF on every channel of pixels whose luminance exceeds
  // gamma; unmasked pixels are copied. Returns the number of masked pixels.
  std::size_t (*reverse_masked)(const std::uint8_t* rgb, const double* gray, double gamma,
                                std::uint8_t* out, std::size_t pixels);

  // scores[t] = dot(templates + t*stride, vec) over `length` entries.
  void (*batch_dot)(const double* templates, std::size_t count, std::size_t stride,
                    const double* vec, std::size_t length, double* scores);
};

// Reference implementation, available everywhere.
const KernelTable& scalar_table() noexcept;

// True when the CPU and the build both support the variant.
bool isa_supported(Isa isa) noexcept;

// Table for a specific ISA. Falls back to scalar when unsupported.
const KernelTable& kernel_table(Isa isa) noexcept;

// Table selected for this process.
const KernelTable& active() noexcept;

}  // namespace shotguard::kernels
