#pragma once

// Fixed-pitch 5x9 bitmap font shared by the synthetic page renderer and the
// built-in glyph OCR engine. Glyphs sit in a 6x10 cell (one blank column on
// the right, one blank row at the bottom); rows 0-6 hold capitals and the
// baseline, rows 7-8 hold descenders. Text is always drawn on the cell grid.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "shotguard/image.hpp"

namespace shotguard::font {

inline constexpr std::size_t kGlyphWidth = 5;
inline constexpr std::size_t kGlyphHeight = 9;
inline constexpr std::size_t kCellWidth = 6;
inline constexpr std::size_t kCellHeight = 10;

struct Glyph {
  char ch;
  std::array<std::uint8_t, kCellWidth * kCellHeight> ink;  // row-major cell, 1 = ink

  bool at(std::size_t x, std::size_t y) const noexcept { return ink[y * kCellWidth + x] != 0; }
};

// Printable ASCII '!'..'~'. Space is the empty cell and has no glyph.
std::span<const Glyph> glyphs();
const Glyph* find_glyph(char ch);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct TextStyle {
  std::size_t scale = 2;
  Rgb ink{0, 0, 0};
  std::optional<Rgb> background;  // fills the whole cell when set
};

// Grid dimensions of an image at a given scale.
std::size_t grid_columns(std::size_t image_width, std::size_t scale);
std::size_t grid_rows(std::size_t image_height, std::size_t scale);

// Draws `text` starting at grid cell (col,row). Characters without a glyph
// render as blank cells; anything past the image edge is clipped.
void draw_text(Screenshot& img, std::size_t col, std::size_t row, std::string_view text,
               const TextStyle& style);

}  // namespace shotguard::font
