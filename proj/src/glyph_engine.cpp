#include <algorithm>
#include <cmath>
#include <numeric>

#include "shotguard/error.hpp"
#include "shotguard/font.hpp"
#include "shotguard/kernels.hpp"
#include "shotguard/ocr.hpp"

namespace shotguard {
namespace {

constexpr std::size_t kCellLen = font::kCellWidth * font::kCellHeight;
constexpr int kMaxLumNumerator = 255 * 1000;

// log1p(Y) indexed by the exact BT.601 numerator 299R + 587G + 114B.
const std::vector<double>& log_luminance_lut() {
  static const std::vector<double> lut = [] {
    std::vector<double> t(kMaxLumNumerator + 1);
    for (int n = 0; n <= kMaxLumNumerator; ++n) t[n] = std::log1p(n / 1000.0);
    return t;
  }();
  return lut;
}

// Zero-mean, unit-norm in place. Returns false for a flat vector.
bool standardize(double* v, std::size_t n) {
  const double mean = std::accumulate(v, v + n, 0.0) / static_cast<double>(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] -= mean;
    norm += v[i] * v[i];
  }
  if (norm <= 0.0) return false;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < n; ++i) v[i] /= norm;
  return true;
}

enum class CellKind { blank, glyph, unknown };

struct Cell {
  CellKind kind = CellKind::blank;
  char ch = ' ';
  double score = 0.0;
};

}  // namespace

GlyphEngine::GlyphEngine(GlyphEngineConfig cfg) : cfg_(cfg) {
  if (cfg_.scale == 0) throw InvalidInput("glyph engine scale must be positive");
  for (const auto& g : font::glyphs()) {
    std::vector<double> row(g.ink.begin(), g.ink.end());
    if (!standardize(row.data(), row.size())) continue;
    templates_.insert(templates_.end(), row.begin(), row.end());
    labels_.push_back(g.ch);
  }
}

std::vector<RecognizedText> GlyphEngine::recognize(const Screenshot& img) const {
  const auto& lut = log_luminance_lut();
  const auto& k = kernels::active();
  const std::size_t s = cfg_.scale;
  const std::size_t cols = font::grid_columns(img.width(), s);
  const std::size_t rows = font::grid_rows(img.height(), s);
  const double block_area = static_cast<double>(s * s);

  std::vector<double> cell(kCellLen);
  std::vector<double> log_cell(kCellLen);
  std::vector<double> scores(labels_.size());
  std::vector<RecognizedText> out;

  auto classify = [&](std::size_t col, std::size_t row) {
    const std::size_t ox = col * font::kCellWidth * s;
    const std::size_t oy = row * font::kCellHeight * s;
    for (std::size_t cy = 0; cy < font::kCellHeight; ++cy) {
      for (std::size_t cx = 0; cx < font::kCellWidth; ++cx) {
        double log_acc = 0.0;
        int lin_acc = 0;
        for (std::size_t dy = 0; dy < s; ++dy) {
          const std::uint8_t* p = img.pixel(ox + cx * s, oy + cy * s + dy);
          for (std::size_t dx = 0; dx < s; ++dx, p += 3) {
            const int n = 299 * p[0] + 587 * p[1] + 114 * p[2];
            log_acc += lut[n];
            lin_acc += n;
          }
        }
        log_cell[cy * font::kCellWidth + cx] = log_acc / block_area;
        cell[cy * font::kCellWidth + cx] = static_cast<double>(lin_acc) / block_area;
      }
    }
    // Visibility is judged on relative contrast, shape on linear luminance.
    const auto [lo, hi] = std::minmax_element(log_cell.begin(), log_cell.end());
    if (*hi - *lo < cfg_.min_log_contrast || !standardize(cell.data(), cell.size())) {
      return Cell{};
    }
    k.batch_dot(templates_.data(), labels_.size(), kCellLen, cell.data(), kCellLen,
                scores.data());
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t) {
      if (std::abs(scores[t]) > std::abs(scores[best])) best = t;
    }
    const double score = std::abs(scores[best]);
    if (score < cfg_.min_correlation) return Cell{CellKind::unknown, '?', score};
    return Cell{CellKind::glyph, labels_[best], score};
  };

  for (std::size_t row = 0; row < rows; ++row) {
    std::string text;
    double score_sum = 0.0;
    std::size_t glyph_count = 0;
    std::size_t gap = 0;
    auto flush = [&] {
      if (glyph_count >= cfg_.min_fragment_chars) {
        out.push_back({text, score_sum / static_cast<double>(glyph_count)});
      }
      text.clear();
      score_sum = 0.0;
      glyph_count = 0;
      gap = 0;
    };
    for (std::size_t col = 0; col < cols; ++col) {
      const Cell c = classify(col, row);
      switch (c.kind) {
        case CellKind::glyph:
          if (gap == 1 && !text.empty()) text.push_back(' ');
          if (gap > 1) flush();
          text.push_back(c.ch);
          score_sum += c.score;
          ++glyph_count;
          gap = 0;
          break;
        case CellKind::blank:
        case CellKind::unknown:
          ++gap;
          break;
      }
    }
    flush();
  }
  return out;
}

}  // namespace shotguard
