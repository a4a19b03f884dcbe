#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shotguard/detector.hpp"
#include "shotguard/synth.hpp"

namespace shotguard::bench {

struct ManifestEntry {
  std::filesystem::path image_path;  // resolved against the manifest directory
  Label label = Label::benign;
  std::string group;
  std::size_t line = 0;
};

/// CSV manifest, one `path,label,group` record per line. An optional header
/// line, blank lines and `#` comments are skipped. Every bad line (unknown
/// label, wrong field count, missing or undecodable file) is collected and
/// reported together in one IngestionError.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Everything decide() needs; shared read-only across workers.
struct DetectorConfig {
  CalibrationResult calibration;
  std::shared_ptr<const RuleSet> rules;
  std::shared_ptr<const TextExtractor> engine;  // null: visual branch only, degraded
  DetectorOptions options;
};

/// Source of labelled screenshots, addressed by index.
struct SampleSource {
  std::size_t count = 0;
  std::function<synth::LabeledImage(std::size_t)> load;
};

SampleSource from_manifest(const std::vector<ManifestEntry>& entries);
SampleSource from_images(std::span<const synth::LabeledImage> images);

struct SampleOutcome {
  std::string id;
  std::string group;
  Label truth = Label::benign;
  Label predicted = Label::benign;
  bool vsi_evaluated = false;
  double vsi_score = 0.0;
  bool vsi_flag = false;
  bool textual_flag = false;
  bool degraded = false;
  StageTimings timings;
};

struct Counts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 0.0;
  double f1 = 0.0;  // 0 when precision + recall == 0
};

// Rates from raw counts; a rate with an empty denominator is 0.
Rates rates_from_counts(const Counts& c);

struct GroupRate {
  std::string group;
  Label label = Label::benign;  // benign groups report FPR, malicious groups TPR
  std::size_t count = 0;
  std::size_t flagged = 0;
  double rate = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending in both coordinates
  double auc = 0.0;
};

struct MetricsReport {
  std::vector<GroupRate> groups;  // benign groups first, then malicious; each by name
  Counts counts;
  Rates micro;                     // pooled counts
  std::optional<Counts> vsi_branch;  // visual flag alone, when it was evaluated
  std::optional<Rates> macro;      // mean of per-group rates, see bench.cpp
  bool aggregate_f1_defined = true;
  std::optional<RocCurve> roc;     // threshold sweep, textual flag held fixed
  std::vector<std::string> warnings;
  std::vector<SampleOutcome> samples;  // in source order
};

struct EvalOptions {
  std::size_t workers = 1;
};

/// Runs decide() on every sample (in parallel up to `workers`) and reduces.
MetricsReport evaluate(const SampleSource& source, const DetectorConfig& cfg,
                       const EvalOptions& opts = {});
MetricsReport evaluate_corpus(const std::vector<ManifestEntry>& entries, const DetectorConfig& cfg,
                              const EvalOptions& opts = {});

/// Pure reduction used by evaluate(); order-independent.
MetricsReport summarize(std::vector<SampleOutcome> outcomes);

/// Sweeps tau over every observed score with the flag rule score < tau.
/// Starts at (0,0), ends at (1,1); AUC by the trapezoidal rule, which equals
/// P(malicious < benign) with half credit for ties.
RocCurve roc_sweep(std::span<const double> benign_scores, std::span<const double> malicious_scores);

struct SweepRow {
  double sigma = 0.0;
  MetricsReport report;
};

/// Perturbs every image with add_gaussian_noise (per-image seed derived from
/// `seed` and the sample index) and evaluates. sigma == 0 rows are identical
/// to an unperturbed evaluation.
std::vector<SweepRow> robustness_sweep(const SampleSource& source, std::span<const double> sigmas,
                                       std::uint64_t seed, const DetectorConfig& cfg,
                                       const EvalOptions& opts = {});

struct TimingReport {
  std::size_t images = 0;        // images averaged (warm-up excluded)
  double warmup_seconds = 0.0;   // first image end to end
  double vsi = 0.0;
  double cpr_ocr = 0.0;
  double apd = 0.0;
  double total = 0.0;
  double proportion_vsi = 0.0;
  double proportion_cpr_ocr = 0.0;
  double proportion_apd = 0.0;
};

/// Single-threaded per-stage wall-clock means. The first image is timed
/// separately as warm-up when more than one image is given.
TimingReport profile_runtime(const SampleSource& source, const DetectorConfig& cfg);

// Reports.
std::string metrics_to_json(const MetricsReport& report);
std::string metrics_table(const MetricsReport& report);
std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string timing_to_json(const TimingReport& report);
std::string timing_table(const TimingReport& report);
std::string roc_to_csv(const RocCurve& roc);

}  // namespace shotguard::bench
