#pragma once

// Generators and brute-force oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "shotguard/image.hpp"

namespace shotguard::testing {

inline Screenshot random_image(std::mt19937_64& rng, std::size_t max_side = 32) {
  std::uniform_int_distribution<std::size_t> side(2, max_side);
  const std::size_t w = side(rng), h = side(rng);
  std::vector<std::uint8_t> rgb(w * h * 3);
  // Mix of styles: uniform noise, flat blocks and near-white pages.
  const int style = static_cast<int>(rng() % 3);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> bright(230, 255);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    if (style == 0) {
      rgb[i] = static_cast<std::uint8_t>(byte(rng));
    } else if (style == 1) {
      rgb[i] = static_cast<std::uint8_t>(((i / 3) % w < w / 2) ? 20 : 200);
    } else {
      rgb[i] = static_cast<std::uint8_t>(bright(rng));
    }
  }
  return Screenshot(w, h, std::move(rgb));
}

inline double luminance_oracle(int r, int g, int b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

// Gradient magnitudes with the stencil written out per case.
inline std::vector<double> magnitudes_oracle(const std::vector<double>& y, std::size_t w, std::size_t h) {
  auto at = [&](std::size_t x, std::size_t yy) { return y[yy * w + x]; };
  std::vector<double> out(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double gx, gy;
      if (c == 0) gx = at(1, r) - at(0, r);
      else if (c == w - 1) gx = at(c, r) - at(c - 1, r);
      else gx = (at(c + 1, r) - at(c - 1, r)) / 2.0;
      if (r == 0) gy = at(c, 1) - at(c, 0);
      else if (r == h - 1) gy = at(c, r) - at(c, r - 1);
      else gy = (at(c, r + 1) - at(c, r - 1)) / 2.0;
      out[r * w + c] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

// Textbook two-pass population variance.
inline double variance_oracle(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

inline double vsi_oracle(const Screenshot& img) {
  std::vector<double> y(img.pixel_count());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto* p = img.rgb().data() + 3 * i;
    y[i] = luminance_oracle(p[0], p[1], p[2]);
  }
  return variance_oracle(magnitudes_oracle(y, img.width(), img.height()));
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-9) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

// P(malicious < benign) with half credit for ties.
inline double pairwise_auc(const std::vector<double>& benign, const std::vector<double>& malicious) {
  double wins = 0.0;
  for (double m : malicious) {
    for (double b : benign) wins += m < b ? 1.0 : (m == b ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(benign.size()) * static_cast<double>(malicious.size()));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("shotguard-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace shotguard::testing
