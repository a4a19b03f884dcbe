#include "shotguard/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "shotguard/error.hpp"
#include "shotguard/image_io.hpp"

namespace shotguard::bench {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
  const double d = precision + recall;
  return d == 0.0 ? 0.0 : 2.0 * precision * recall / d;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed ^ (index * 0x9E3779B97F4A7C15ull);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json rates_json(const Rates& r) {
  return {{"tpr", r.tpr}, {"fpr", r.fpr}, {"precision", r.precision}, {"f1", r.f1}};
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read manifest " + path.string());
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::vector<std::string> problems;
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_csv(body);
    if (first_record && fields.size() == 3 && fields[0] == "path" && fields[1] == "label") {
      first_record = false;
      continue;
    }
    first_record = false;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != 3) {
      problems.push_back(where + "expected 3 fields (path,label,group), got " +
                         std::to_string(fields.size()));
      continue;
    }
    ManifestEntry e;
    e.line = line_no;
    e.group = fields[2];
    if (fields[1] == "benign") {
      e.label = Label::benign;
    } else if (fields[1] == "malicious") {
      e.label = Label::malicious;
    } else {
      problems.push_back(where + "unknown label '" + fields[1] + "'");
      continue;
    }
    if (fields[0].empty()) {
      problems.push_back(where + "empty image path");
      continue;
    }
    if (e.group.empty()) {
      problems.push_back(where + "empty group");
      continue;
    }
    std::filesystem::path p(fields[0]);
    e.image_path = p.is_absolute() ? p : base / p;
    if (!std::filesystem::exists(e.image_path)) {
      problems.push_back(where + "image not found: " + e.image_path.string());
      continue;
    }
    if (sniff_format(e.image_path) == ImageFormat::unknown) {
      problems.push_back(where + "not a PNG or JPEG: " + e.image_path.string());
      continue;
    }
    entries.push_back(std::move(e));
  }
  if (!problems.empty()) {
    std::string msg = "manifest " + path.string() + " has " + std::to_string(problems.size()) +
                      " bad record(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw IngestionError(msg);
  }
  return entries;
}

SampleSource from_manifest(const std::vector<ManifestEntry>& entries) {
  return {entries.size(), [entries](std::size_t i) {
            const auto& e = entries[i];
            return synth::LabeledImage{e.image_path.string(), e.group, e.label,
                                       read_image(e.image_path)};
          }};
}

SampleSource from_images(std::span<const synth::LabeledImage> images) {
  return {images.size(), [images](std::size_t i) { return images[i]; }};
}

Rates rates_from_counts(const Counts& c) {
  Rates r;
  r.tpr = safe_ratio(c.tp, c.tp + c.fn);
  r.fpr = safe_ratio(c.fp, c.fp + c.tn);
  r.precision = safe_ratio(c.tp, c.tp + c.fp);
  r.f1 = f1_of(r.precision, r.tpr);
  return r;
}

RocCurve roc_sweep(std::span<const double> benign_scores, std::span<const double> malicious_scores) {
  if (benign_scores.empty() || malicious_scores.empty()) {
    throw InvalidInput("ROC sweep needs benign and malicious scores");
  }
  std::vector<double> ben(benign_scores.begin(), benign_scores.end());
  std::vector<double> mal(malicious_scores.begin(), malicious_scores.end());
  for (double s : ben)
    if (std::isnan(s)) throw InvalidInput("NaN score");
  for (double s : mal)
    if (std::isnan(s)) throw InvalidInput("NaN score");
  std::sort(ben.begin(), ben.end());
  std::sort(mal.begin(), mal.end());

  std::vector<double> thresholds;
  thresholds.reserve(ben.size() + mal.size() + 1);
  std::merge(ben.begin(), ben.end(), mal.begin(), mal.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  RocCurve roc;
  const double nb = static_cast<double>(ben.size());
  const double nm = static_cast<double>(mal.size());
  for (double tau : thresholds) {
    const auto fb = std::lower_bound(ben.begin(), ben.end(), tau) - ben.begin();
    const auto fm = std::lower_bound(mal.begin(), mal.end(), tau) - mal.begin();
    // +inf also flags +inf scores so the curve always reaches (1,1).
    const bool last = std::isinf(tau) && tau > 0;
    roc.points.push_back({last ? 1.0 : static_cast<double>(fb) / nb,
                          last ? 1.0 : static_cast<double>(fm) / nm, tau});
  }
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& a = roc.points[i - 1];
    const auto& b = roc.points[i];
    roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return roc;
}

MetricsReport summarize(std::vector<SampleOutcome> outcomes) {
  MetricsReport rep;
  std::map<std::pair<int, std::string>, GroupRate> groups;
  std::vector<double> ben_scores, mal_scores;
  bool vsi_seen = false;
  Counts vsi;
  for (const auto& o : outcomes) {
    const bool flagged = o.predicted == Label::malicious;
    if (o.truth == Label::malicious) {
      (flagged ? rep.counts.tp : rep.counts.fn)++;
    } else {
      (flagged ? rep.counts.fp : rep.counts.tn)++;
    }
    auto& g = groups[{o.truth == Label::benign ? 0 : 1, o.group}];
    g.group = o.group;
    g.label = o.truth;
    ++g.count;
    g.flagged += flagged ? 1 : 0;
    // The textual flag is fixed for the sweep: such samples are always flagged.
    const double score =
        o.textual_flag ? -std::numeric_limits<double>::infinity() : o.vsi_score;
    (o.truth == Label::benign ? ben_scores : mal_scores).push_back(score);
    if (o.vsi_evaluated) {
      vsi_seen = true;
      if (o.truth == Label::malicious) {
        (o.vsi_flag ? vsi.tp : vsi.fn)++;
      } else {
        (o.vsi_flag ? vsi.fp : vsi.tn)++;
      }
    }
  }
  if (vsi_seen) rep.vsi_branch = vsi;
  for (auto& [key, g] : groups) {
    g.rate = safe_ratio(g.flagged, g.count);
    rep.groups.push_back(g);
  }
  rep.micro = rates_from_counts(rep.counts);

  const bool has_benign = rep.counts.fp + rep.counts.tn > 0;
  const bool has_malicious = rep.counts.tp + rep.counts.fn > 0;
  if (!has_benign || !has_malicious) {
    rep.aggregate_f1_defined = false;
    rep.warnings.push_back("corpus holds a single label; aggregate precision/F1 are undefined");
  } else {
    // Macro: mean per-group TPR and FPR; per-attack-group precision and F1
    // use that group's positives against all benign samples.
    Rates macro;
    std::size_t nb = 0, nm = 0;
    double prec_sum = 0.0, f1_sum = 0.0;
    for (const auto& g : rep.groups) {
      if (g.label == Label::benign) {
        macro.fpr += g.rate;
        ++nb;
      } else {
        macro.tpr += g.rate;
        const double p = safe_ratio(g.flagged, g.flagged + rep.counts.fp);
        prec_sum += p;
        f1_sum += f1_of(p, g.rate);
        ++nm;
      }
    }
    macro.fpr /= static_cast<double>(nb);
    macro.tpr /= static_cast<double>(nm);
    macro.precision = prec_sum / static_cast<double>(nm);
    macro.f1 = f1_sum / static_cast<double>(nm);
    rep.macro = macro;
    if (vsi_seen) rep.roc = roc_sweep(ben_scores, mal_scores);
  }
  rep.samples = std::move(outcomes);
  return rep;
}

MetricsReport evaluate(const SampleSource& source, const DetectorConfig& cfg,
                       const EvalOptions& opts) {
  if (source.count == 0) throw InvalidInput("empty corpus");
  if (!cfg.rules) throw InvalidInput("detector configuration has no rule set");
  std::vector<SampleOutcome> outcomes(source.count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < source.count; i = next++) {
      try {
        const auto sample = source.load(i);
        const Verdict v = decide(sample.image, cfg.calibration, *cfg.rules, cfg.engine.get(),
                                 cfg.options);
        outcomes[i] = {sample.id,     sample.group,     sample.label, v.label,
                       v.vsi.evaluated, v.vsi.score,   v.vsi.flagged, v.textual_flag(),
                       v.degraded,    v.timings};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = source.count;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(opts.workers, 1, source.count);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  auto rep = summarize(std::move(outcomes));
  const auto& t = cfg.options.toggles;
  if (t.use_text && !t.use_apd) {
    rep.warnings.push_back("cue rules off: the text branch flags any text of at least " +
                           std::to_string(cfg.options.text_presence_floor) + " alphanumerics");
  }
  if (t.use_text && !cfg.engine) {
    rep.warnings.push_back("no text engine: every verdict is visual-only (degraded)");
  }
  return rep;
}

MetricsReport evaluate_corpus(const std::vector<ManifestEntry>& entries, const DetectorConfig& cfg,
                              const EvalOptions& opts) {
  return evaluate(from_manifest(entries), cfg, opts);
}

std::vector<SweepRow> robustness_sweep(const SampleSource& source, std::span<const double> sigmas,
                                       std::uint64_t seed, const DetectorConfig& cfg,
                                       const EvalOptions& opts) {
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("sigma values must be finite and >= 0");
  }
  std::vector<SweepRow> rows;
  for (double sigma : sigmas) {
    SampleSource noisy{source.count, [&source, sigma, seed](std::size_t i) {
                         auto sample = source.load(i);
                         sample.image = add_gaussian_noise(sample.image, {sigma, mix_seed(seed, i)});
                         return sample;
                       }};
    rows.push_back({sigma, evaluate(noisy, cfg, opts)});
  }
  return rows;
}

TimingReport profile_runtime(const SampleSource& source, const DetectorConfig& cfg) {
  if (source.count == 0) throw InvalidInput("empty corpus");
  if (!cfg.rules) throw InvalidInput("detector configuration has no rule set");
  DetectorOptions options = cfg.options;
  options.concurrent_views = false;

  TimingReport rep;
  const std::size_t first = source.count > 1 ? 1 : 0;
  for (std::size_t i = 0; i < source.count; ++i) {
    const auto sample = source.load(i);
    const Verdict v = decide(sample.image, cfg.calibration, *cfg.rules, cfg.engine.get(), options);
    if (i < first) {
      rep.warmup_seconds = v.timings.total();
      continue;
    }
    rep.vsi += v.timings.vsi_seconds;
    rep.cpr_ocr += v.timings.cpr_ocr_seconds;
    rep.apd += v.timings.apd_seconds;
    ++rep.images;
  }
  const double n = static_cast<double>(rep.images);
  rep.vsi /= n;
  rep.cpr_ocr /= n;
  rep.apd /= n;
  rep.total = rep.vsi + rep.cpr_ocr + rep.apd;
  if (rep.total > 0.0) {
    rep.proportion_vsi = rep.vsi / rep.total;
    rep.proportion_cpr_ocr = rep.cpr_ocr / rep.total;
    rep.proportion_apd = rep.apd / rep.total;
  }
  return rep;
}

std::string metrics_to_json(const MetricsReport& r) {
  json doc;
  doc["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
  doc["micro"] = rates_json(r.micro);
  if (!r.aggregate_f1_defined) {
    doc["micro"].erase("precision");
    doc["micro"].erase("f1");
  }
  doc["macro"] = r.macro ? rates_json(*r.macro) : json(nullptr);
  if (r.vsi_branch) {
    const Rates v = rates_from_counts(*r.vsi_branch);
    doc["vsi_branch"] = {{"tp", r.vsi_branch->tp}, {"fp", r.vsi_branch->fp}, {"tn", r.vsi_branch->tn},
                         {"fn", r.vsi_branch->fn}, {"tpr", v.tpr}, {"fpr", v.fpr}};
  }
  doc["groups"] = json::array();
  for (const auto& g : r.groups) {
    doc["groups"].push_back({{"group", g.group},
                             {"label", to_string(g.label)},
                             {"metric", g.label == Label::benign ? "fpr" : "tpr"},
                             {"count", g.count},
                             {"flagged", g.flagged},
                             {"rate", g.rate}});
  }
  if (r.roc) {
    json pts = json::array();
    for (const auto& p : r.roc->points) pts.push_back({p.fpr, p.tpr, finite_or_null(p.threshold)});
    doc["roc"] = {{"auc", r.roc->auc}, {"points", pts}};
  }
  doc["warnings"] = r.warnings;
  doc["samples"] = json::array();
  for (const auto& s : r.samples) {
    doc["samples"].push_back({{"id", s.id},
                              {"group", s.group},
                              {"truth", to_string(s.truth)},
                              {"predicted", to_string(s.predicted)},
                              {"vsi_score", s.vsi_score},
                              {"vsi_flag", s.vsi_flag},
                              {"textual_flag", s.textual_flag},
                              {"degraded", s.degraded}});
  }
  return doc.dump(2) + "\n";
}

std::string metrics_table(const MetricsReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "group                 label      n     rate\n";
  for (const auto& g : r.groups) {
    os << std::left << std::setw(22) << g.group << std::setw(10) << to_string(g.label)
       << std::right << std::setw(4) << g.count << "  " << (g.label == Label::benign ? "FPR " : "TPR ")
       << g.rate << "\n";
  }
  os << "micro  TPR " << r.micro.tpr << "  FPR " << r.micro.fpr;
  if (r.aggregate_f1_defined) os << "  precision " << r.micro.precision << "  F1 " << r.micro.f1;
  os << "\n";
  if (r.macro) {
    os << "macro  TPR " << r.macro->tpr << "  FPR " << r.macro->fpr << "  F1 " << r.macro->f1 << "\n";
  }
  if (r.vsi_branch) {
    const Rates v = rates_from_counts(*r.vsi_branch);
    os << "vsi    TPR " << v.tpr << "  FPR " << v.fpr << "  (visual flag alone)\n";
  }
  if (r.roc) os << "AUC " << r.roc->auc << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  json doc = json::array();
  for (const auto& row : rows) {
    json rep = json::parse(metrics_to_json(row.report));
    rep.erase("samples");
    doc.push_back({{"sigma", row.sigma}, {"report", rep}});
  }
  return doc.dump(2) + "\n";
}

std::string timing_to_json(const TimingReport& t) {
  json doc{{"images", t.images},
           {"warmup_seconds", t.warmup_seconds},
           {"mean_seconds", {{"vsi", t.vsi}, {"cpr_ocr", t.cpr_ocr}, {"apd", t.apd}, {"total", t.total}}},
           {"proportions", {{"vsi", t.proportion_vsi}, {"cpr_ocr", t.proportion_cpr_ocr}, {"apd", t.proportion_apd}}}};
  return doc.dump(2) + "\n";
}

std::string timing_table(const TimingReport& t) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "stage      mean s    share\n";
  os << "VSI        " << t.vsi << "    " << std::setprecision(1) << 100 * t.proportion_vsi << "%\n"
     << std::setprecision(4);
  os << "CPR+OCR    " << t.cpr_ocr << "    " << std::setprecision(1) << 100 * t.proportion_cpr_ocr
     << "%\n" << std::setprecision(4);
  os << "APD        " << t.apd << "    " << std::setprecision(1) << 100 * t.proportion_apd << "%\n"
     << std::setprecision(4);
  os << "total      " << t.total << "    (" << t.images << " images, warm-up " << t.warmup_seconds
     << " s)\n";
  return os.str();
}

std::string roc_to_csv(const RocCurve& roc) {
  std::ostringstream os;
  os << std::setprecision(17) << "fpr,tpr,threshold\n";
  for (const auto& p : roc.points) os << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
  return os.str();
}

}  // namespace shotguard::bench
