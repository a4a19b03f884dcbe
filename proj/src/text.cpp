#include "shotguard/text.hpp"

#include <cctype>
#include <exception>
#include <future>

namespace shotguard {

std::string_view to_string(SourceView view) noexcept {
  return view == SourceView::original ? "original" : "reversed";
}

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Byte length of a zero-width or non-breaking-space sequence at `s`, or 0.
// Zero-width: U+200B..U+200D, U+2060, U+FEFF. NBSP: U+00A0.
std::size_t zero_width_len(std::string_view s) {
  auto starts = [&](std::string_view p) { return s.substr(0, p.size()) == p; };
  if (starts("\xE2\x80\x8B") || starts("\xE2\x80\x8C") || starts("\xE2\x80\x8D") ||
      starts("\xE2\x81\xA0") || starts("\xEF\xBB\xBF")) {
    return 3;
  }
  return 0;
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    if (const auto zw = zero_width_len(text.substr(i)); zw != 0) {
      i += zw;
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    const bool nbsp = c == 0xC2 && i + 1 < text.size() &&
                      static_cast<unsigned char>(text[i + 1]) == 0xA0;
    if (is_space(c) || nbsp) {
      pending_space = !out.empty();
      i += nbsp ? 2 : 1;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    ++i;
  }
  return out;
}

void TextCandidateSet::add(const RecognizedText& r, SourceView view) {
  std::string norm = normalize_text(r.text);
  if (norm.empty()) return;
  for (const auto& f : fragments_) {
    if (f.normalized == norm) return;
  }
  if (!merged_.empty()) merged_.push_back('\n');
  TextFragment frag;
  frag.text = r.text;
  frag.offset = merged_.size();
  merged_ += norm;
  frag.normalized = std::move(norm);
  frag.source_view = view;
  frag.confidence = r.confidence;
  fragments_.push_back(std::move(frag));
}

TextCandidateSet TextCandidateSet::build(const std::vector<RecognizedText>& original,
                                         const std::vector<RecognizedText>& reversed) {
  TextCandidateSet set;
  for (const auto& r : original) set.add(r, SourceView::original);
  for (const auto& r : reversed) set.add(r, SourceView::reversed);
  return set;
}

ExtractionLimiter::ExtractionLimiter(std::ptrdiff_t max_parallel)
    : sem_(max_parallel < 1 ? 1 : max_parallel) {}

namespace {

struct ViewOutcome {
  std::vector<RecognizedText> texts;
  std::exception_ptr error;
};

ViewOutcome run_view(const Screenshot& img, const TextExtractor& engine,
                     ExtractionLimiter* limiter) {
  ViewOutcome out;
  try {
    std::optional<ExtractionLimiter::Slot> slot;
    if (limiter != nullptr) slot.emplace(*limiter);
    out.texts = engine.recognize(img);
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

bool is_timeout(const std::exception_ptr& e) {
  if (!e) return false;
  try {
    std::rethrow_exception(e);
  } catch (const ExtractionTimeout&) {
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

TextCandidateSet extract_text(const Screenshot& img, const TextExtractor& engine,
                              const ExtractOptions& opts) {
  opts.reversal.validate();
  ViewOutcome original;
  ViewOutcome reversed;
  if (!opts.dual_view) {
    original = run_view(img, engine, opts.limiter);
  } else {
    const Screenshot inverted = reverse_contrast(img, opts.reversal);
    if (opts.concurrent) {
      auto pending = std::async(std::launch::async, [&] {
        return run_view(inverted, engine, opts.limiter);
      });
      original = run_view(img, engine, opts.limiter);
      reversed = pending.get();
    } else {
      original = run_view(img, engine, opts.limiter);
      reversed = run_view(inverted, engine, opts.limiter);
    }
  }

  // Hard failures win over timeouts; a timeout keeps the finished view.
  for (const auto* o : {&original, &reversed}) {
    if (o->error && !is_timeout(o->error)) std::rethrow_exception(o->error);
  }
  if (original.error || reversed.error) {
    auto partial = TextCandidateSet::build(original.error ? std::vector<RecognizedText>{}
                                                          : original.texts,
                                           reversed.error ? std::vector<RecognizedText>{}
                                                          : reversed.texts);
    const char* which = original.error ? "original" : "reversed";
    throw ExtractionTimeout(engine.name() + " timed out on the " + which + " view",
                            std::move(partial));
  }
  return TextCandidateSet::build(original.texts, reversed.texts);
}

}  // namespace shotguard
