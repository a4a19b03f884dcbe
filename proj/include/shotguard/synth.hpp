#pragma once

// Synthetic web-page screenshots for tests and benchmarks that need no
// external data. Benign pages are textured (photos, buttons, ordinary shop
// copy); malicious pages either wash out local structure or carry
// action-oriented text, visibly or hidden as near-white on white.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shotguard/detector.hpp"
#include "shotguard/image.hpp"

namespace shotguard::synth {

struct PageSpec {
  std::size_t width = 640;
  std::size_t height = 400;
  std::size_t text_scale = 2;
};

// Benign groups.
inline constexpr std::string_view kScreenshot = "Screenshot";
inline constexpr std::string_view kEmbed = "Embed";
// Malicious groups.
inline constexpr std::string_view kOverlay = "Overlay";        // translucent washout
inline constexpr std::string_view kPopup = "Popup";            // dimmed page + modal with cues
inline constexpr std::string_view kTextInject = "TextInject";  // inline cue text
inline constexpr std::string_view kBanner = "Banner";          // cue text on a colored strip
inline constexpr std::string_view kConcealed = "Concealed";    // 250-on-255 cue text
inline constexpr std::string_view kFakePage = "FakePage";      // flat gradient page with a lure

std::span<const std::string_view> benign_groups();
std::span<const std::string_view> malicious_groups();
Label group_label(std::string_view group);

// Phrases used by the renderer. Benign copy matches no default rule; every
// cue phrase matches at least one.
std::span<const std::string_view> benign_phrases();
std::span<const std::string_view> cue_phrases();

/// Renders one page of the given group. Pure function of (group, seed, spec).
Screenshot render(std::string_view group, std::uint64_t seed, const PageSpec& spec = {});

/// Textured page with `text` drawn in black on one content row.
Screenshot render_with_text(std::string_view text, std::uint64_t seed, const PageSpec& spec = {});

/// Textured page with `text` drawn at luminance 250 on a luminance-255 panel.
Screenshot render_concealed(std::string_view text, std::uint64_t seed, const PageSpec& spec = {});

struct LabeledImage {
  std::string id;
  std::string group;
  Label label = Label::benign;
  Screenshot image;
};

struct CorpusSpec {
  PageSpec page;
  std::size_t benign_per_group = 60;
  std::size_t malicious_per_group = 20;
  std::uint64_t seed = 1;
};

std::vector<LabeledImage> generate_corpus(const CorpusSpec& spec);

// Benign-only sample, e.g. for calibration or a held-out FPR check.
std::vector<LabeledImage> generate_benign(std::size_t count, std::uint64_t seed,
                                          const PageSpec& page = {});

/// Writes every image as PNG plus a manifest.csv next to them.
/// Returns the manifest path.
std::filesystem::path write_corpus(const std::vector<LabeledImage>& corpus,
                                   const std::filesystem::path& dir);

}  // namespace shotguard::synth
