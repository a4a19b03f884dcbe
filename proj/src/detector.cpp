#include "shotguard/detector.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "shotguard/error.hpp"

namespace shotguard {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

constexpr std::string_view kCalibrationFormat = "shotguard-calibration";

}  // namespace

CalibrationResult CalibrationResult::fixed(double tau) {
  CalibrationResult r;
  r.tau = tau;
  r.alpha = kDefaultAlpha;
  return r;
}

std::string CalibrationResult::score_digest() const {
  std::uint64_t h = 1469598103934665603ull;
  for (double s : benign_scores) {
    auto bits = std::bit_cast<std::uint64_t>(s);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFFu;
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

CalibrationResult calibrate_threshold(std::span<const double> benign_scores, double alpha,
                                      std::size_t min_scores) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in [0,1)");
  if (benign_scores.size() < min_scores || benign_scores.empty()) {
    throw CalibrationError("calibration needs at least " + std::to_string(std::max<std::size_t>(min_scores, 1)) +
                           " benign scores, got " + std::to_string(benign_scores.size()));
  }
  std::vector<double> sorted(benign_scores.begin(), benign_scores.end());
  if (!std::all_of(sorted.begin(), sorted.end(), [](double s) { return std::isfinite(s); })) {
    throw InvalidInput("benign scores must be finite");
  }
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
  CalibrationResult r;
  r.alpha = alpha;
  r.tau = sorted[std::min(k, n - 1)];
  r.benign_count = n;
  const auto below = static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), r.tau) - sorted.begin());
  r.achieved_fpr = static_cast<double>(below) / static_cast<double>(n);
  r.benign_scores = std::move(sorted);
  r.created_at = utc_now();
  return r;
}

std::string calibration_to_json(const CalibrationResult& c) {
  nlohmann::json doc{{"format", kCalibrationFormat},
                     {"version", 1},
                     {"tau", c.tau},
                     {"alpha", c.alpha},
                     {"benign_count", c.benign_count},
                     {"achieved_fpr", c.achieved_fpr},
                     {"score_digest", c.score_digest()},
                     {"created_at", c.created_at},
                     {"benign_scores", c.benign_scores}};
  return doc.dump(2) + "\n";
}

CalibrationResult calibration_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("calibration artifact is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kCalibrationFormat) {
      throw ConfigError("not a calibration artifact");
    }
    CalibrationResult c;
    c.tau = doc.at("tau").get<double>();
    c.alpha = doc.at("alpha").get<double>();
    c.benign_count = doc.at("benign_count").get<std::size_t>();
    c.achieved_fpr = doc.at("achieved_fpr").get<double>();
    c.created_at = doc.value("created_at", "");
    c.benign_scores = doc.at("benign_scores").get<std::vector<double>>();
    if (c.benign_scores.size() != c.benign_count) {
      throw ConfigError("calibration artifact: benign_count does not match the stored scores");
    }
    if (doc.contains("score_digest") && doc.at("score_digest").get<std::string>() != c.score_digest()) {
      throw ConfigError("calibration artifact: score digest mismatch");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("calibration artifact: ") + e.what());
  }
}

void save_calibration(const CalibrationResult& calib, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << calibration_to_json(calib);
}

CalibrationResult load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read calibration artifact " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return calibration_from_json(buf.str());
}

std::string_view to_string(Label label) noexcept {
  return label == Label::malicious ? "malicious" : "benign";
}

bool fuse(bool visual_flag, bool textual_flag) noexcept { return visual_flag || textual_flag; }

std::vector<std::string> Verdict::evidence() const {
  std::vector<std::string> lines;
  if (vsi.flagged) {
    lines.push_back("vsi_flag: φ=" + num(vsi.score) + " < τ=" + num(vsi.tau));
  }
  for (const auto& m : cue_matches) {
    std::string line = "cue: " + m.category.name() + " rule=" + m.rule_id + " span=\"" +
                       m.matched_span + "\"";
    for (const auto& f : candidates.fragments()) {
      if (m.offset >= f.offset && m.offset < f.offset + f.normalized.size()) {
        line += " in \"" + f.text + "\"";
        break;
      }
    }
    line += " (" + std::string(to_string(m.source_view)) + " view)";
    lines.push_back(std::move(line));
  }
  if (text_presence_flag) lines.push_back("text_presence: extracted text above the length floor");
  if (fail_closed_flag) lines.push_back("fail_closed: text extraction failed: " + extraction_note);
  return lines;
}

Verdict decide_ablated(const Screenshot& img, const CalibrationResult& calib,
                       const RuleSet& rules, const TextExtractor* engine,
                       const BranchToggles& toggles, DetectorOptions opts) {
  opts.toggles = toggles;
  return decide(img, calib, rules, engine, opts);
}

Verdict decide(const Screenshot& img, const CalibrationResult& calib, const RuleSet& rules,
               const TextExtractor* engine, const DetectorOptions& opts) {
  Verdict v;
  const auto& t = opts.toggles;

  if (t.use_vsi) {
    const auto t0 = Clock::now();
    const VsiReport report = vsi_score(img);
    v.vsi = {true, report.score, calib.tau, report.score < calib.tau};
    v.timings.vsi_seconds = seconds_since(t0);
  }

  if (t.use_text) {
    const auto t0 = Clock::now();
    if (engine == nullptr) {
      v.degraded = true;
      v.extraction_note = "no text extraction engine configured";
    } else {
      ExtractOptions eo;
      eo.reversal = opts.reversal;
      eo.dual_view = t.use_cpr;
      eo.concurrent = opts.concurrent_views;
      eo.limiter = opts.limiter;
      try {
        v.candidates = extract_text(img, *engine, eo);
      } catch (const ExtractionTimeout& e) {
        v.candidates = e.partial();
        v.degraded = true;
        v.extraction_note = e.what();
      } catch (const ExtractionUnavailable& e) {
        v.degraded = true;
        v.extraction_note = e.what();
      }
    }
    v.timings.cpr_ocr_seconds = seconds_since(t0);

    const auto t1 = Clock::now();
    if (t.use_apd) {
      v.cue_matches = match_patterns(v.candidates, rules);
    } else {
      const auto& text = v.candidates.merged_text();
      const auto alnum = static_cast<std::size_t>(std::count_if(
          text.begin(), text.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); }));
      v.text_presence_flag = alnum >= opts.text_presence_floor;
    }
    v.timings.apd_seconds = seconds_since(t1);
    v.fail_closed_flag = v.degraded && opts.fail_closed;
  }

  const bool malicious = fuse(v.vsi.flagged, v.textual_flag()) || v.fail_closed_flag;
  v.label = malicious ? Label::malicious : Label::benign;
  return v;
}

}  // namespace shotguard
