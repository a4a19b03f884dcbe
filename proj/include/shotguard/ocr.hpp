#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shotguard/text.hpp"

namespace shotguard {

/// Reads text drawn in the built-in bitmap font on its cell grid.
///
/// Each grid cell is reduced to block means, gated on a minimum contrast of
/// log luminance, and classified by normalized correlation of the linear
/// block means against every glyph template (either polarity). The log gate
/// makes contrast relative: 250-on-255 stays below it while 5-on-0 clears it.
/// Cells that match no glyph count as blank. One blank cell is a space; two
/// or more end a fragment.
struct GlyphEngineConfig {
  std::size_t scale = 2;
  double min_log_contrast = 0.5;
  double min_correlation = 0.8;
  std::size_t min_fragment_chars = 2;
};

class GlyphEngine final : public TextExtractor {
 public:
  explicit GlyphEngine(GlyphEngineConfig cfg = {});

  std::string name() const override { return "glyph"; }
  std::vector<RecognizedText> recognize(const Screenshot& img) const override;

  const GlyphEngineConfig& config() const noexcept { return cfg_; }

 private:
  GlyphEngineConfig cfg_;
  std::vector<double> templates_;  // zero-mean, unit-norm rows of kCellWidth*kCellHeight
  std::vector<char> labels_;
};

/// Tesseract-compatible command-line engine, run once per view in a child
/// process: `<executable> <png> stdout -l <lang> --oem N --psm M`.
struct TesseractConfig {
  std::string executable = "tesseract";
  std::string language = "eng";
  int oem = 3;
  int psm = 3;
  std::optional<std::filesystem::path> tessdata_dir;
  std::chrono::milliseconds timeout{30000};

  // LSTM engine with automatic page segmentation.
  static TesseractConfig standard();
  // LSTM engine with single-block segmentation; the alternate configuration.
  static TesseractConfig alternate();
};

class TesseractEngine final : public TextExtractor {
 public:
  explicit TesseractEngine(TesseractConfig cfg = TesseractConfig::standard());

  std::string name() const override;
  std::vector<RecognizedText> recognize(const Screenshot& img) const override;

  // True when the executable can be spawned and reports a version.
  bool available() const;

  const TesseractConfig& config() const noexcept { return cfg_; }

 private:
  TesseractConfig cfg_;
};

}  // namespace shotguard
