#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shotguard/image.hpp"
#include "shotguard/imaging.hpp"
#include "shotguard/rules.hpp"
#include "shotguard/text.hpp"

namespace shotguard {

// Threshold shipped for callers without a calibration run (reference operating
// point at alpha = 0.05). Only meaningful for that gradient operator and
// corpus; recalibrate for anything else.
inline constexpr double kDefaultTau = 4450.0;
inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::size_t kMinCalibrationScores = 20;

struct CalibrationResult {
  double tau = kDefaultTau;
  double alpha = kDefaultAlpha;
  std::vector<double> benign_scores;  // ascending; empty for a fixed threshold
  std::size_t benign_count = 0;
  double achieved_fpr = 0.0;  // fraction of benign_scores strictly below tau
  std::string created_at;     // ISO-8601 UTC, informational

  // Threshold without a benign corpus behind it.
  static CalibrationResult fixed(double tau);
  // FNV-1a over the IEEE-754 bits of benign_scores.
  std::string score_digest() const;

  friend bool operator==(const CalibrationResult&, const CalibrationResult&) = default;
};

/// Lower-tail empirical quantile: with scores sorted ascending and
/// k = floor(alpha * n), tau is the (k+1)-th smallest score, so at most
/// alpha * n scores fall strictly below it. Throws CalibrationError when
/// fewer than `min_scores` values are given and InvalidInput for alpha
/// outside [0,1) or non-finite scores.
CalibrationResult calibrate_threshold(std::span<const double> benign_scores, double alpha,
                                      std::size_t min_scores = kMinCalibrationScores);

// Calibration artifact (JSON). Doubles round-trip exactly.
void save_calibration(const CalibrationResult& calib, const std::filesystem::path& path);
CalibrationResult load_calibration(const std::filesystem::path& path);
std::string calibration_to_json(const CalibrationResult& calib);
CalibrationResult calibration_from_json(std::string_view text);

enum class Label { benign, malicious };
std::string_view to_string(Label label) noexcept;

struct BranchToggles {
  bool use_text = true;  // false: visual branch only
  bool use_vsi = true;
  bool use_cpr = true;
  bool use_apd = true;
};

struct DetectorOptions {
  BranchToggles toggles;
  ReversalConfig reversal;
  // With use_apd off, text of at least this many alphanumerics flags.
  std::size_t text_presence_floor = 12;
  // Report malicious instead of degrading when extraction fails.
  bool fail_closed = false;
  bool concurrent_views = true;
  ExtractionLimiter* limiter = nullptr;
};

struct StageTimings {
  double vsi_seconds = 0.0;
  double cpr_ocr_seconds = 0.0;
  double apd_seconds = 0.0;
  double total() const noexcept { return vsi_seconds + cpr_ocr_seconds + apd_seconds; }
};

struct VsiEvidence {
  bool evaluated = false;
  double score = 0.0;
  double tau = 0.0;
  bool flagged = false;
};

struct Verdict {
  Label label = Label::benign;
  VsiEvidence vsi;
  std::vector<CueMatch> cue_matches;
  bool text_presence_flag = false;  // only set with use_apd off
  bool degraded = false;
  bool fail_closed_flag = false;
  std::string extraction_note;
  TextCandidateSet candidates;
  StageTimings timings;

  bool textual_flag() const noexcept { return !cue_matches.empty() || text_presence_flag; }
  // One human-readable line per piece of evidence; never empty when malicious.
  std::vector<std::string> evidence() const;
};

/// Fusion of the branch flags: logical OR.
bool fuse(bool visual_flag, bool textual_flag) noexcept;

/// Full pipeline. Extraction failures degrade to the visual branch alone
/// unless fail_closed is set; imaging errors propagate.
Verdict decide(const Screenshot& img, const CalibrationResult& calib, const RuleSet& rules,
               const TextExtractor* engine, const DetectorOptions& opts = {});

/// Pipeline with branches switched off. All toggles on is identical to decide.
Verdict decide_ablated(const Screenshot& img, const CalibrationResult& calib,
                       const RuleSet& rules, const TextExtractor* engine,
                       const BranchToggles& toggles, DetectorOptions opts = {});

}  // namespace shotguard
