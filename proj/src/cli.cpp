#include "shotguard/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "shotguard/bench.hpp"
#include "shotguard/detector.hpp"
#include "shotguard/error.hpp"
#include "shotguard/image_io.hpp"
#include "shotguard/ocr.hpp"
#include "shotguard/synth.hpp"

namespace shotguard::cli {
namespace {

struct EngineFlags {
  std::string engine = "auto";
  std::string tesseract = "tesseract";
  std::string language = "eng";
  double timeout_s = 30.0;
  std::size_t glyph_scale = 2;
};

struct DetectFlags {
  std::string calibration;
  std::optional<double> tau;
  std::string rules;
  double gamma = 240.0;
  bool no_vsi = false;
  bool no_cpr = false;
  bool no_apd = false;
  bool fail_closed = false;
  std::size_t workers = 1;
};

// CLI11 skips an environment value that fails validation; report it instead.
std::string bad_environment() {
  const std::pair<const char*, CLI::Validator> checks[] = {
      {"SHOTGUARD_ENGINE", CLI::IsMember({"auto", "glyph", "tesseract", "tesseract-alt", "none"})},
      {"SHOTGUARD_OCR_TIMEOUT", CLI::PositiveNumber},
  };
  for (const auto& [name, validator] : checks) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') continue;
    std::string value(raw);
    if (auto msg = validator(value); !msg.empty()) return std::string(name) + ": " + msg;
  }
  return {};
}

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--engine", f.engine,
                  "Text extractor: auto, glyph, tesseract, tesseract-alt or none "
                  "(env SHOTGUARD_ENGINE; auto picks tesseract when it runs, else glyph)")
      ->check(CLI::IsMember({"auto", "glyph", "tesseract", "tesseract-alt", "none"}))
      ->envname("SHOTGUARD_ENGINE");
  cmd->add_option("--tesseract", f.tesseract, "Tesseract executable (env SHOTGUARD_TESSERACT)")
      ->envname("SHOTGUARD_TESSERACT");
  cmd->add_option("--ocr-lang", f.language, "Tesseract language pack (env SHOTGUARD_OCR_LANG)")
      ->envname("SHOTGUARD_OCR_LANG");
  cmd->add_option("--ocr-timeout", f.timeout_s, "OCR timeout per view in seconds (env SHOTGUARD_OCR_TIMEOUT)")
      ->check(CLI::PositiveNumber)
      ->envname("SHOTGUARD_OCR_TIMEOUT");
  cmd->add_option("--glyph-scale", f.glyph_scale, "Cell scale read by the glyph engine")
      ->check(CLI::PositiveNumber);
}

void add_detect_flags(CLI::App* cmd, DetectFlags& f) {
  auto* calib = cmd->add_option("--calibration", f.calibration, "Calibration artifact from `calibrate`");
  auto* tau = cmd->add_option("--tau", f.tau, "Fixed VSI threshold (default 4450 without --calibration)");
  calib->excludes(tau);
  tau->excludes(calib);
  cmd->add_option("--rules", f.rules, "Rule file (default: built-in rules)");
  cmd->add_option("--gamma", f.gamma, "Near-white luminance threshold")->check(CLI::Range(0.0, 255.0));
  cmd->add_flag("--no-vsi", f.no_vsi, "Ablation: skip the visual branch");
  cmd->add_flag("--no-cpr", f.no_cpr, "Ablation: OCR the original view only");
  cmd->add_flag("--no-apd", f.no_apd, "Ablation: flag on text presence instead of cue rules");
  cmd->add_flag("--fail-closed", f.fail_closed, "Report malicious when text extraction fails");
}

std::shared_ptr<const TextExtractor> make_engine(const EngineFlags& f) {
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000));
  auto tesseract = [&](TesseractConfig cfg) {
    cfg.executable = f.tesseract;
    cfg.language = f.language;
    cfg.timeout = timeout;
    return std::make_shared<TesseractEngine>(cfg);
  };
  if (f.engine == "none") return nullptr;
  if (f.engine == "glyph") return std::make_shared<GlyphEngine>(GlyphEngineConfig{.scale = f.glyph_scale});
  if (f.engine == "tesseract") return tesseract(TesseractConfig::standard());
  if (f.engine == "tesseract-alt") return tesseract(TesseractConfig::alternate());
  auto t = tesseract(TesseractConfig::standard());
  if (t->available()) return t;
  return std::make_shared<GlyphEngine>(GlyphEngineConfig{.scale = f.glyph_scale});
}

bench::DetectorConfig make_detector(const DetectFlags& d, const EngineFlags& e) {
  bench::DetectorConfig cfg;
  if (!d.calibration.empty()) {
    cfg.calibration = load_calibration(d.calibration);
  } else {
    cfg.calibration = CalibrationResult::fixed(d.tau.value_or(kDefaultTau));
  }
  cfg.rules = d.rules.empty() ? std::make_shared<RuleSet>(default_ruleset())
                              : std::make_shared<RuleSet>(load_ruleset(d.rules));
  cfg.engine = make_engine(e);
  cfg.options.toggles = {true, !d.no_vsi, !d.no_cpr, !d.no_apd};
  cfg.options.reversal.gamma = d.gamma;
  cfg.options.fail_closed = d.fail_closed;
  return cfg;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

std::vector<std::filesystem::path> images_in(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && sniff_format(e.path()) != ImageFormat::unknown) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<double> parse_sigmas(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || !(v >= 0.0)) throw CLI::ValidationError("--sigmas", "not a nonnegative number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--sigmas", "empty list");
  return out;
}

nlohmann::json verdict_json(const Verdict& v) {
  nlohmann::json matches = nlohmann::json::array();
  for (const auto& m : v.cue_matches) {
    matches.push_back({{"rule_id", m.rule_id},
                       {"category", m.category.name()},
                       {"span", m.matched_span},
                       {"source_view", to_string(m.source_view)}});
  }
  nlohmann::json fragments = nlohmann::json::array();
  for (const auto& f : v.candidates.fragments()) {
    fragments.push_back({{"text", f.text}, {"source_view", to_string(f.source_view)}});
  }
  return {{"label", to_string(v.label)},
          {"vsi", {{"evaluated", v.vsi.evaluated}, {"score", v.vsi.score}, {"tau", v.vsi.tau}, {"flagged", v.vsi.flagged}}},
          {"cue_matches", matches},
          {"text_presence_flag", v.text_presence_flag},
          {"degraded", v.degraded},
          {"extraction_note", v.extraction_note},
          {"fragments", fragments},
          {"evidence", v.evidence()},
          {"timings", {{"vsi", v.timings.vsi_seconds}, {"cpr_ocr", v.timings.cpr_ocr_seconds}, {"apd", v.timings.apd_seconds}}}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"shotguard: screenshot prompt-injection detector and benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "shotguard 1.0.0");

  // calibrate
  std::string calib_input, calib_out = "calibration.json";
  double alpha = kDefaultAlpha;
  std::size_t min_scores = kMinCalibrationScores;
  auto* calibrate = app.add_subcommand("calibrate", "Derive the VSI threshold from benign screenshots");
  calibrate->add_option("benign", calib_input, "Directory of benign images, or a manifest (benign rows used)")
      ->required();
  calibrate->add_option("--alpha", alpha, "False-positive budget")->check(CLI::Range(0.0, 0.999999));
  calibrate->add_option("--out,-o", calib_out, "Calibration artifact path");
  calibrate->add_option("--min-scores", min_scores, "Minimum benign sample size");

  // detect
  std::string detect_image, detect_json;
  DetectFlags dflags;
  EngineFlags eflags;
  auto* detect = app.add_subcommand("detect", "Classify one screenshot (exit 0 benign, 2 malicious)");
  detect->add_option("image", detect_image, "PNG or JPEG screenshot")->required();
  detect->add_option("--json", detect_json, "Also write the verdict as JSON");
  add_detect_flags(detect, dflags);
  add_engine_flags(detect, eflags);

  // bench
  std::string bench_manifest, bench_out, bench_roc;
  auto* bench_cmd = app.add_subcommand("bench", "Evaluate a labelled corpus");
  bench_cmd->add_option("manifest", bench_manifest, "CSV manifest: path,label,group")->required();
  bench_cmd->add_option("--out,-o", bench_out, "JSON report path (default stdout table only)");
  bench_cmd->add_option("--roc", bench_roc, "Write ROC points as CSV");
  bench_cmd->add_option("--workers", dflags.workers, "Parallel detections")->check(CLI::PositiveNumber);
  add_detect_flags(bench_cmd, dflags);
  add_engine_flags(bench_cmd, eflags);

  // perturb
  std::string perturb_manifest, perturb_out, sigma_list = "0,10,25,50";
  std::uint64_t seed = 7;
  auto* perturb = app.add_subcommand("perturb", "Robustness sweep under additive Gaussian noise");
  perturb->add_option("manifest", perturb_manifest, "CSV manifest")->required();
  perturb->add_option("--sigmas", sigma_list, "Comma-separated noise levels")
      ->check(CLI::Validator(
          [](std::string& v) {
            try {
              parse_sigmas(v);
            } catch (const CLI::ValidationError& e) {
              return std::string(e.what());
            }
            return std::string();
          },
          "SIGMAS"));
  perturb->add_option("--seed", seed, "Noise seed");
  perturb->add_option("--out,-o", perturb_out, "JSON report path");
  perturb->add_option("--workers", dflags.workers, "Parallel detections")->check(CLI::PositiveNumber);
  add_detect_flags(perturb, dflags);
  add_engine_flags(perturb, eflags);

  // profile
  std::string profile_manifest, profile_out;
  auto* profile = app.add_subcommand("profile", "Per-stage latency, single-threaded");
  profile->add_option("manifest", profile_manifest, "CSV manifest")->required();
  profile->add_option("--out,-o", profile_out, "JSON report path");
  add_detect_flags(profile, dflags);
  add_engine_flags(profile, eflags);

  // rules
  std::string rules_file;
  auto* rules = app.add_subcommand("rules", "Rule file utilities");
  rules->require_subcommand(1);
  auto* rules_check = rules->add_subcommand("check", "Validate a rule file");
  rules_check->add_option("file", rules_file, "Rule file")->required();
  auto* rules_dump = rules->add_subcommand("dump", "Print the built-in rule set as a rule file");

  // synth
  std::string synth_dir;
  synth::CorpusSpec corpus;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labelled corpus with manifest.csv");
  synth_cmd->add_option("dir", synth_dir, "Output directory")->required();
  synth_cmd->add_option("--benign-per-group", corpus.benign_per_group);
  synth_cmd->add_option("--malicious-per-group", corpus.malicious_per_group);
  synth_cmd->add_option("--seed", corpus.seed);
  synth_cmd->add_option("--width", corpus.page.width)->check(CLI::Range(64, 8192));
  synth_cmd->add_option("--height", corpus.page.height)->check(CLI::Range(64, 8192));

  // render
  std::string render_out, render_text, render_group;
  bool render_concealed = false;
  std::uint64_t render_seed = 1;
  synth::PageSpec render_page;
  auto* render = app.add_subcommand("render", "Write one synthetic screenshot");
  render->add_option("out", render_out, "PNG path")->required();
  auto* text_opt = render->add_option("--text", render_text, "Draw this text on a textured page");
  render->add_flag("--concealed", render_concealed, "Draw --text at luminance 250 on white")->needs(text_opt);
  render->add_option("--group", render_group, "Synthetic group to render instead of --text")->excludes(text_opt);
  render->add_option("--seed", render_seed);
  render->add_option("--width", render_page.width)->check(CLI::Range(64, 8192));
  render->add_option("--height", render_page.height)->check(CLI::Range(64, 8192));

  try {
    app.parse(argc, argv);
    const auto chosen = app.get_subcommands();
    if (!chosen.empty() && chosen.front()->get_option_no_throw("--engine") != nullptr) {
      if (const auto msg = bad_environment(); !msg.empty()) {
        err << "error: " << msg << "\n";
        return kExitUsage;
      }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*calibrate) {
      std::vector<double> scores;
      const std::filesystem::path input(calib_input);
      std::vector<std::filesystem::path> files;
      if (std::filesystem::is_directory(input)) {
        files = images_in(input);
      } else {
        for (const auto& e : bench::load_manifest(input))
          if (e.label == Label::benign) files.push_back(e.image_path);
      }
      for (const auto& f : files) scores.push_back(vsi_score(read_image(f)).score);
      const auto result = calibrate_threshold(scores, alpha, min_scores);
      save_calibration(result, calib_out);
      out << "tau " << result.tau << " from " << result.benign_count << " benign images at alpha "
          << result.alpha << " (achieved FPR " << result.achieved_fpr << ") -> " << calib_out << "\n";
      return 0;
    }
    if (*detect) {
      const auto cfg = make_detector(dflags, eflags);
      const Verdict v = decide(read_image(detect_image), cfg.calibration, *cfg.rules, cfg.engine.get(),
                               cfg.options);
      out << "verdict: " << to_string(v.label) << "\n";
      if (v.vsi.evaluated) out << "vsi: φ=" << v.vsi.score << " τ=" << v.vsi.tau << "\n";
      for (const auto& line : v.evidence()) out << line << "\n";
      if (v.degraded) out << "degraded: " << v.extraction_note << "\n";
      if (!detect_json.empty()) write_text(detect_json, verdict_json(v).dump(2) + "\n", out);
      return v.label == Label::malicious ? kExitMalicious : kExitBenign;
    }
    if (*bench_cmd) {
      const auto cfg = make_detector(dflags, eflags);
      const auto report = bench::evaluate_corpus(bench::load_manifest(bench_manifest), cfg, {dflags.workers});
      out << bench::metrics_table(report);
      if (!bench_out.empty()) write_text(bench_out, bench::metrics_to_json(report), out);
      if (!bench_roc.empty() && report.roc) write_text(bench_roc, bench::roc_to_csv(*report.roc), out);
      return 0;
    }
    if (*perturb) {
      const auto cfg = make_detector(dflags, eflags);
      const auto sigmas = parse_sigmas(sigma_list);
      const auto entries = bench::load_manifest(perturb_manifest);
      const auto rows = bench::robustness_sweep(bench::from_manifest(entries), sigmas, seed, cfg, {dflags.workers});
      for (const auto& row : rows) {
        out << "sigma " << row.sigma << ": TPR " << row.report.micro.tpr << " FPR " << row.report.micro.fpr
            << " F1 " << row.report.micro.f1 << "\n";
      }
      if (!perturb_out.empty()) write_text(perturb_out, bench::sweep_to_json(rows), out);
      return 0;
    }
    if (*profile) {
      const auto cfg = make_detector(dflags, eflags);
      const auto report = bench::profile_runtime(bench::from_manifest(bench::load_manifest(profile_manifest)), cfg);
      out << bench::timing_table(report);
      if (!profile_out.empty()) write_text(profile_out, bench::timing_to_json(report), out);
      return 0;
    }
    if (*rules_check) {
      const auto set = load_ruleset(rules_file);
      out << rules_file << ": " << set.size() << " rules OK";
      for (const auto& c : set.categories()) out << " [" << c.name() << "]";
      out << "\n";
      return 0;
    }
    if (*rules_dump) {
      out << ruleset_to_json(default_ruleset());
      return 0;
    }
    if (*synth_cmd) {
      const auto manifest = synth::write_corpus(synth::generate_corpus(corpus), synth_dir);
      out << "wrote " << manifest.string() << "\n";
      return 0;
    }
    if (*render) {
      Screenshot img = !render_group.empty()     ? synth::render(render_group, render_seed, render_page)
                       : render_text.empty()      ? synth::render(synth::kScreenshot, render_seed, render_page)
                       : render_concealed         ? synth::render_concealed(render_text, render_seed, render_page)
                                                  : synth::render_with_text(render_text, render_seed, render_page);
      write_png(img, render_out);
      out << "wrote " << render_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace shotguard::cli
