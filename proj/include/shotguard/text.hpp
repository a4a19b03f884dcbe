#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "shotguard/error.hpp"
#include "shotguard/image.hpp"
#include "shotguard/reversal.hpp"

namespace shotguard {

enum class SourceView { original, reversed };

std::string_view to_string(SourceView view) noexcept;

/// One piece of text an engine read off a raster.
struct RecognizedText {
  std::string text;
  std::optional<double> confidence;  // in [0,1] when the engine reports one
};

struct TextFragment {
  std::string text;        // as recognized
  std::string normalized;  // case-folded, whitespace-collapsed, zero-width stripped
  SourceView source_view = SourceView::original;
  std::optional<double> confidence;
  std::size_t offset = 0;  // start of `normalized` inside merged_text
};

/// Union of the fragments from both views. Only exact duplicates after
/// normalization are dropped (first occurrence wins, original view first);
/// nothing is dropped for low confidence.
class TextCandidateSet {
 public:
  TextCandidateSet() = default;

  static TextCandidateSet build(const std::vector<RecognizedText>& original,
                                const std::vector<RecognizedText>& reversed);

  const std::vector<TextFragment>& fragments() const noexcept { return fragments_; }
  // Normalized fragments joined with '\n'.
  const std::string& merged_text() const noexcept { return merged_; }
  bool empty() const noexcept { return fragments_.empty(); }

 private:
  void add(const RecognizedText& r, SourceView view);

  std::vector<TextFragment> fragments_;
  std::string merged_;
};

/// Case-fold ASCII, strip zero-width code points, collapse runs of whitespace
/// to one space and trim.
std::string normalize_text(std::string_view text);

/// The engine could not be reached (missing binary, crashed process, ...).
class ExtractionUnavailable : public Error {
 public:
  using Error::Error;
};

/// The engine exceeded its time budget. Carries whatever the other view
/// produced before the deadline.
class ExtractionTimeout : public Error {
 public:
  ExtractionTimeout(const std::string& what, TextCandidateSet partial = {})
      : Error(what), partial_(std::move(partial)) {}
  const TextCandidateSet& partial() const noexcept { return partial_; }

 private:
  TextCandidateSet partial_;
};

/// Text extraction boundary. Implementations must be callable concurrently.
class TextExtractor {
 public:
  virtual ~TextExtractor() = default;
  virtual std::string name() const = 0;
  // Throws ExtractionUnavailable or ExtractionTimeout.
  virtual std::vector<RecognizedText> recognize(const Screenshot& img) const = 0;
};

/// Caps how many engine invocations run at once across threads.
class ExtractionLimiter {
 public:
  explicit ExtractionLimiter(std::ptrdiff_t max_parallel);

  class Slot {
   public:
    explicit Slot(ExtractionLimiter& l) : limiter_(l) { limiter_.sem_.acquire(); }
    ~Slot() { limiter_.sem_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ExtractionLimiter& limiter_;
  };

 private:
  std::counting_semaphore<> sem_;
};

struct ExtractOptions {
  ReversalConfig reversal;
  bool dual_view = true;  // false: original view only
  bool concurrent = true; // run the two views on separate threads
  ExtractionLimiter* limiter = nullptr;
};

/// Runs the engine on the screenshot and on its contrast-reversed view and
/// unions the results. Output is independent of which view finishes first.
TextCandidateSet extract_text(const Screenshot& img, const TextExtractor& engine,
                              const ExtractOptions& opts = {});

}  // namespace shotguard
