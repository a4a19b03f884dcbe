// Compiled with -mavx2 -mfma -ffp-contract=off so magnitudes stay bit-identical
// to the scalar reference; only summation order differs.

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstring>

#include "gradient_row.hpp"
#include "variants.hpp"

namespace shotguard::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void luminance(const std::uint8_t* rgb, double* out, std::size_t pixels) {
  const __m128i r_sel = _mm_setr_epi8(0, -1, -1, -1, 3, -1, -1, -1, 6, -1, -1, -1, 9, -1, -1, -1);
  const __m128i g_sel = _mm_setr_epi8(1, -1, -1, -1, 4, -1, -1, -1, 7, -1, -1, -1, 10, -1, -1, -1);
  const __m128i b_sel = _mm_setr_epi8(2, -1, -1, -1, 5, -1, -1, -1, 8, -1, -1, -1, 11, -1, -1, -1);
  const __m128i wr = _mm_set1_epi32(299);
  const __m128i wg = _mm_set1_epi32(587);
  const __m128i wb = _mm_set1_epi32(114);
  const __m256d scale = _mm256_set1_pd(1000.0);

  std::size_t i = 0;
  // Each step reads 16 bytes but consumes 12.
  for (; (i + 4) * 3 + 4 <= pixels * 3; i += 4) {
    const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rgb + 3 * i));
    __m128i num = _mm_mullo_epi32(_mm_shuffle_epi8(raw, r_sel), wr);
    num = _mm_add_epi32(num, _mm_mullo_epi32(_mm_shuffle_epi8(raw, g_sel), wg));
    num = _mm_add_epi32(num, _mm_mullo_epi32(_mm_shuffle_epi8(raw, b_sel), wb));
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_cvtepi32_pd(num), scale));
  }
  for (; i < pixels; ++i) {
    const int num = 299 * rgb[3 * i] + 587 * rgb[3 * i + 1] + 114 * rgb[3 * i + 2];
    out[i] = static_cast<double>(num) / 1000.0;
  }
}

inline __m256d magnitude4(const double* row, const detail::VerticalStencil& v, std::size_t x,
                          __m256d half, __m256d vscale) {
  const __m256d right = _mm256_loadu_pd(row + x + 1);
  const __m256d left = _mm256_loadu_pd(row + x - 1);
  const __m256d gx = _mm256_mul_pd(half, _mm256_sub_pd(right, left));
  const __m256d gy =
      _mm256_mul_pd(vscale, _mm256_sub_pd(_mm256_loadu_pd(v.down + x), _mm256_loadu_pd(v.up + x)));
  return _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy)));
}

inline double border_magnitude(const double* row, const detail::VerticalStencil& v,
                               std::size_t width, std::size_t x) {
  const double gx = detail::horizontal_diff(row, width, x);
  const double gy = v.scale * (v.down[x] - v.up[x]);
  return std::sqrt(gx * gx + gy * gy);
}

GradientMoments gradient_moments(const double* gray, std::size_t width, std::size_t height) {
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d vsum = _mm256_setzero_pd();
  __m256d vsq = _mm256_setzero_pd();
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t y = 0; y < height; ++y) {
    const double* row = gray + y * width;
    const auto v = detail::vertical_stencil(gray, width, height, y);
    const __m256d vscale = _mm256_set1_pd(v.scale);
    std::size_t x = 1;
    for (; x + 4 < width; x += 4) {
      const __m256d mag = magnitude4(row, v, x, half, vscale);
      vsum = _mm256_add_pd(vsum, mag);
      vsq = _mm256_add_pd(vsq, _mm256_mul_pd(mag, mag));
    }
    for (; x + 1 < width; ++x) {
      const double m = border_magnitude(row, v, width, x);
      sum += m;
      sq += m * m;
    }
    for (std::size_t bx : {std::size_t{0}, width - 1}) {
      const double m = border_magnitude(row, v, width, bx);
      sum += m;
      sq += m * m;
    }
  }
  return {hsum(vsum) + sum, hsum(vsq) + sq, width * height};
}

void gradient_magnitudes(const double* gray, std::size_t width, std::size_t height,
                         double* out) {
  const __m256d half = _mm256_set1_pd(0.5);
  for (std::size_t y = 0; y < height; ++y) {
    const double* row = gray + y * width;
    double* dst = out + y * width;
    const auto v = detail::vertical_stencil(gray, width, height, y);
    const __m256d vscale = _mm256_set1_pd(v.scale);
    dst[0] = border_magnitude(row, v, width, 0);
    std::size_t x = 1;
    for (; x + 4 < width; x += 4) _mm256_storeu_pd(dst + x, magnitude4(row, v, x, half, vscale));
    for (; x < width; ++x) dst[x] = border_magnitude(row, v, width, x);
  }
}

// XOR patterns for four pixels, indexed by the 4-bit compare mask.
constexpr std::array<std::array<std::uint8_t, 12>, 16> make_flip_lut() {
  std::array<std::array<std::uint8_t, 12>, 16> lut{};
  for (int bits = 0; bits < 16; ++bits)
    for (int p = 0; p < 4; ++p)
      for (int c = 0; c < 3; ++c) lut[bits][3 * p + c] = (bits >> p) & 1 ? 0xFF : 0x00;
  return lut;
}
constexpr auto kFlipLut = make_flip_lut();

std::size_t reverse_masked(const std::uint8_t* rgb, const double* gray, double gamma,
                           std::uint8_t* out, std::size_t pixels) {
  const __m256d g = _mm256_set1_pd(gamma);
  std::size_t masked = 0;
  std::size_t i = 0;
  for (; i + 4 <= pixels; i += 4) {
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(gray + i), g, _CMP_GT_OQ));
    masked += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(bits)));
    std::uint8_t block[12];
    std::memcpy(block, rgb + 3 * i, 12);
    const auto& flip = kFlipLut[bits];
    for (int k = 0; k < 12; ++k) block[k] ^= flip[k];
    std::memcpy(out + 3 * i, block, 12);
  }
  for (; i < pixels; ++i) {
    const std::uint8_t flip = gray[i] > gamma ? 0xFF : 0x00;
    masked += flip & 1u;
    for (int c = 0; c < 3; ++c) out[3 * i + c] = rgb[3 * i + c] ^ flip;
  }
  return masked;
}

void batch_dot(const double* templates, std::size_t count, std::size_t stride,
               const double* vec, std::size_t length, double* scores) {
  for (std::size_t t = 0; t < count; ++t) {
    const double* row = templates + t * stride;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= length; i += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(vec + i), acc);
    double s = hsum(acc);
    for (; i < length; ++i) s += row[i] * vec[i];
    scores[t] = s;
  }
}

}  // namespace

namespace detail {

const KernelTable* avx2_table() noexcept {
  static const KernelTable table{Isa::avx2,          &luminance,      &gradient_moments,
                                 &gradient_magnitudes, &reverse_masked, &batch_dot};
  return &table;
}

}  // namespace detail
}  // namespace shotguard::kernels
