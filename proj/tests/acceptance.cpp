// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are the acceptance tolerances, not tuned values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <thread>
#include <iostream>
#include <map>
#include <sstream>

#include "shotguard/bench.hpp"
#include "shotguard/detector.hpp"
#include "shotguard/imaging.hpp"
#include "shotguard/kernels.hpp"
#include "shotguard/ocr.hpp"
#include "shotguard/reversal.hpp"
#include "shotguard/synth.hpp"
#include "support.hpp"

using namespace shotguard;
namespace sg = shotguard::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Shared fixtures: the synthetic corpus and a threshold calibrated on a
// disjoint benign sample.
struct Fixture {
  std::vector<synth::LabeledImage> corpus = synth::generate_corpus({});
  CalibrationResult calibration;
  std::shared_ptr<const RuleSet> rules = std::make_shared<RuleSet>(default_ruleset());
  std::shared_ptr<const TextExtractor> engine = std::make_shared<GlyphEngine>();

  Fixture() {
    std::vector<double> scores;
    for (const auto& s : synth::generate_benign(240, 1001)) scores.push_back(vsi_score(s.image).score);
    calibration = calibrate_threshold(scores, kDefaultAlpha);
  }

  bench::DetectorConfig config(BranchToggles toggles = {}) const {
    bench::DetectorConfig cfg;
    cfg.calibration = calibration;
    cfg.rules = rules;
    cfg.engine = engine;
    cfg.options.toggles = toggles;
    return cfg;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void vsi_oracle(Outcome& o) {
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto img = sg::random_image(rng, 32);
    const double fast = vsi_score(img).score;
    const double slow = sg::vsi_oracle(img);
    const double rel = std::abs(fast - slow) / std::max({std::abs(fast), std::abs(slow), 1e-300});
    if (!(std::abs(fast - slow) <= 1e-9 * std::max(std::abs(fast), std::abs(slow)) || fast == slow)) {
      o.check(false, "image " + std::to_string(i));
    }
    worst = std::max(worst, fast == slow ? 0.0 : rel);
  }
  bool constant_zero = true;
  for (int v : {0, 1, 77, 128, 254, 255}) {
    constant_zero = constant_zero && vsi_score(Screenshot::filled(17 + v % 9, 13, v, 255 - v, v / 2)).score == 0.0;
  }
  const double elapsed = seconds_since(t0);
  o.check(constant_zero, "constant image scored nonzero");
  o.check(elapsed < 5.0, "runtime");
  o.detail << "1000 images, max rel err " << worst << ", constant -> 0: " << (constant_zero ? "yes" : "no")
           << ", " << elapsed << " s, kernels " << kernels::isa_name(kernels::active().isa);
}

void calibration_guarantee(Outcome& o) {
  std::mt19937_64 rng(99);
  double worst_excess = -1.0;
  for (int set = 0; set < 200; ++set) {
    const std::size_t n = 20 + rng() % 1000;
    std::vector<double> s(n);
    std::lognormal_distribution<double> logn(8.0, 1.0);
    for (auto& x : s) x = set % 4 == 0 ? std::round(logn(rng) / 500.0) : logn(rng);
    for (double alpha : {0.01, 0.05, 0.1}) {
      const auto c = calibrate_threshold(s, alpha);
      const double below =
          static_cast<double>(std::count_if(s.begin(), s.end(), [&](double x) { return x < c.tau; })) / n;
      worst_excess = std::max(worst_excess, below - alpha);
      o.check(below <= alpha, "set " + std::to_string(set));
    }
  }
  o.detail << "200 sets x 3 alphas, max(fraction below - alpha) = " << worst_excess << ";";

  std::vector<double> cal, held;
  for (const auto& s : synth::generate_benign(240, 1001)) cal.push_back(vsi_score(s.image).score);
  for (const auto& s : synth::generate_benign(300, 2002)) held.push_back(vsi_score(s.image).score);
  for (double alpha : {0.01, 0.05, 0.1}) {
    const auto c = calibrate_threshold(cal, alpha);
    const double n = static_cast<double>(held.size());
    const double fpr = std::count_if(held.begin(), held.end(), [&](double x) { return x < c.tau; }) / n;
    const double bound = alpha + 3.0 * std::sqrt(alpha * (1 - alpha) / n);
    o.check(fpr <= bound, "held-out alpha " + std::to_string(alpha));
    o.detail << " held-out alpha=" << alpha << ": FPR " << fpr << " <= " << bound;
  }
}

void reversal_algebra(Outcome& o) {
  std::mt19937_64 rng(5150);
  std::size_t pixels = 0, masked = 0, dark_images = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto img = sg::random_image(rng, 32);
    const ReversalConfig cfg{};
    const auto gray = to_grayscale(img);
    const auto out = reverse_contrast(img, cfg);
    double max_y = 0.0;
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        const auto* a = img.pixel(x, y);
        const auto* b = out.pixel(x, y);
        const bool m = gray.at(x, y) > cfg.gamma;
        max_y = std::max(max_y, gray.at(x, y));
        for (int c = 0; c < 3; ++c) {
          if (b[c] != (m ? 255 - a[c] : a[c])) o.check(false, "pixel partition, image " + std::to_string(i));
        }
        ++pixels;
        masked += m;
      }
    }
    if (max_y <= cfg.gamma) {
      ++dark_images;
      o.check(out == img, "dark image changed");
    }
  }
  // Explicit dark fixtures so the passthrough case is always exercised.
  for (int i = 0; i < 200; ++i) {
    auto img = sg::random_image(rng, 32);
    for (auto& c : img.mutable_rgb()) c = static_cast<std::uint8_t>(c * 240 / 255);
    ++dark_images;
    o.check(reverse_contrast(img) == img, "dark image changed");
  }
  o.detail << pixels << " pixels checked (" << masked << " reversed), " << dark_images << " dark images unchanged";
}

void concealed_recovery(Outcome& o) {
  const auto& f = fixture();
  std::size_t full = 0, ablated = 0, vsi_flags = 0;
  const std::size_t n = 50;
  for (std::size_t i = 0; i < n; ++i) {
    const auto img = synth::render(synth::kConcealed, 7000 + i);
    const auto v = decide(img, f.calibration, *f.rules, f.engine.get());
    const auto w = decide_ablated(img, f.calibration, *f.rules, f.engine.get(), {.use_cpr = false});
    full += v.label == Label::malicious;
    ablated += w.label == Label::malicious;
    vsi_flags += v.vsi.flagged;
  }
  o.check(full == n, "full pipeline must detect every fixture");
  o.check(ablated <= n / 10, "w/o reversal must detect at most 10%");
  o.detail << n << " fixtures: full " << full << "/" << n << ", w/o reversal " << ablated << "/" << n
           << " (visual flags " << vsi_flags << ")";
}

void separation(Outcome& o) {
  std::map<std::string, std::vector<double>> by_group;
  std::vector<double> benign;
  for (const auto& s : fixture().corpus) {
    const double phi = vsi_score(s.image).score;
    by_group[s.group].push_back(phi);
    if (s.label == Label::benign) benign.push_back(phi);
  }
  const double mb = median(benign);
  std::vector<double> overlays = by_group[std::string(synth::kOverlay)];
  const double mo = median(overlays);
  const double ratio = mo > 0 ? mb / mo : INFINITY;
  o.check(ratio >= 5.0, "benign median / overlay median >= 5");
  o.detail << "benign median " << mb << ", overlay median " << mo << ", ratio " << ratio << "; other groups:";
  for (const auto& [g, v] : by_group) o.detail << " " << g << "=" << median(v);
}

void roc_oracle(Outcome& o) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  int corpora = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t total = 2 + rng() % 199;
    const std::size_t nb = 1 + rng() % (total - 1), nm = total - nb;
    std::vector<double> ben(nb), mal(nm);
    const bool ties = trial % 2;
    for (auto& v : ben) v = ties ? static_cast<double>(rng() % 12) : std::ldexp(static_cast<double>(rng() >> 12), -30);
    for (auto& v : mal) v = ties ? static_cast<double>(rng() % 9) : std::ldexp(static_cast<double>(rng() >> 13), -30);
    if (trial % 7 == 0) mal[0] = -INFINITY;
    const double diff = std::abs(bench::roc_sweep(ben, mal).auc - sg::pairwise_auc(ben, mal));
    worst = std::max(worst, diff);
    o.check(diff <= 1e-9, "trial " + std::to_string(trial));
    ++corpora;
  }
  std::vector<double> ben, mal;
  for (int i = 0; i < 100; ++i) {
    ben.push_back(1000.0 + i);
    mal.push_back(static_cast<double>(i));
  }
  const double sep = bench::roc_sweep(ben, mal).auc;
  o.check(sep == 1.0, "separable AUC");
  o.detail << corpora << " corpora <= 200 scores, max |sweep - pairwise| = " << worst << ", separable AUC " << sep;
}

void metric_identities(Outcome& o) {
  const auto worked = bench::rates_from_counts({8, 1, 9, 2});
  o.check(std::abs(worked.f1 - 0.8421) < 5e-5, "worked example");
  const auto rep = bench::evaluate(bench::from_images(fixture().corpus), fixture().config(), {workers()});
  const auto& c = rep.counts;
  const double tpr = static_cast<double>(c.tp) / (c.tp + c.fn);
  const double fpr = static_cast<double>(c.fp) / (c.fp + c.tn);
  const double prec = static_cast<double>(c.tp) / (c.tp + c.fp);
  const double f1 = 2 * prec * tpr / (prec + tpr);
  const double err = std::max({std::abs(rep.micro.tpr - tpr), std::abs(rep.micro.fpr - fpr),
                               std::abs(rep.micro.precision - prec), std::abs(rep.micro.f1 - f1)});
  o.check(err <= 1e-12, "corpus rates vs counts");
  std::size_t recount = 0;
  for (const auto& g : rep.groups) recount += g.count;
  o.check(recount == c.tp + c.fp + c.tn + c.fn, "group counts");
  o.detail << "TP8/FN2/FP1/TN9 -> F1 " << worked.f1 << "; corpus TP " << c.tp << " FN " << c.fn << " FP " << c.fp
           << " TN " << c.tn << ", max |report - recomputed| = " << err;
}

void efficiency(Outcome& o) {
  const synth::PageSpec hd{1920, 1080, 2};
  std::vector<synth::LabeledImage> imgs;
  const auto groups = {synth::kScreenshot, synth::kEmbed, synth::kPopup, synth::kConcealed, synth::kTextInject};
  std::uint64_t seed = 1;
  imgs.push_back({"warmup", std::string(synth::kScreenshot), Label::benign, synth::render(synth::kScreenshot, 0, hd)});
  for (int round = 0; round < 4; ++round) {
    for (auto g : groups) imgs.push_back({"hd", std::string(g), synth::group_label(g), synth::render(g, seed++, hd)});
  }
  const auto t = bench::profile_runtime(bench::from_images(imgs), fixture().config());
  o.check(t.vsi < 0.1, "VSI mean < 0.1 s");
  o.check(t.apd < 0.01, "APD mean < 0.01 s");
  o.check(t.total < 5.0, "end-to-end mean < 5 s");
  o.detail << t.images << " images at 1920x1080, mean VSI " << t.vsi << " s, CPR+OCR " << t.cpr_ocr << " s, APD "
           << t.apd << " s, total " << t.total << " s (engine " << fixture().engine->name()
           << ", CPU only, single thread)";
}

void robustness(Outcome& o) {
  const auto& f = fixture();
  const std::vector<double> sigmas{0, 10, 25, 50};
  const auto source = bench::from_images(f.corpus);
  const auto rows = bench::robustness_sweep(source, sigmas, 424242, f.config(), {workers()});
  const auto direct = bench::evaluate(source, f.config(), {workers()});
  const bool identical = bench::metrics_to_json(rows[0].report) == bench::metrics_to_json(direct);
  o.check(identical, "sigma 0 row differs from direct evaluation");
  double worst = 0.0;
  for (const auto& r : rows) {
    const double drop = rows[0].report.micro.f1 - r.report.micro.f1;
    worst = std::max(worst, drop);
    o.detail << (r.sigma == 0 ? "" : ", ") << "sigma=" << r.sigma << " F1 " << r.report.micro.f1;
  }
  o.check(worst <= 0.15, "F1 drop <= 0.15");
  o.detail << "; max drop " << worst << "; sigma 0 identical: " << (identical ? "yes" : "no");
}

void ablation(Outcome& o) {
  const auto& f = fixture();
  const auto source = bench::from_images(f.corpus);
  const auto full = bench::evaluate(source, f.config(), {workers()});
  o.detail << "full TPR " << full.micro.tpr << " FPR " << full.micro.fpr;
  const std::vector<std::pair<std::string, BranchToggles>> variants{
      {"w/o VSI", {.use_vsi = false}}, {"w/o CPR", {.use_cpr = false}}, {"w/o APD", {.use_apd = false}}};
  for (const auto& [name, toggles] : variants) {
    const auto r = bench::evaluate(source, f.config(toggles), {workers()});
    o.check(full.micro.tpr >= r.micro.tpr, name + " recall above full");
    if (name == "w/o VSI") o.check(r.micro.fpr <= full.micro.fpr, "w/o VSI FPR above full");
    o.detail << "; " << name << " TPR " << r.micro.tpr << " FPR " << r.micro.fpr;
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"VSI single pass equals two-pass oracle", vsi_oracle},
      {"Calibration false-positive guarantee", calibration_guarantee},
      {"Reversal partition and dark passthrough", reversal_algebra},
      {"Concealed text needs the reversed view", concealed_recovery},
      {"Benign vs overlay VSI separation", separation},
      {"ROC sweep equals pairwise AUC", roc_oracle},
      {"Metric identities from raw counts", metric_identities},
      {"Per-stage efficiency at 1080p", efficiency},
      {"F1 stability under Gaussian noise", robustness},
      {"Ablation directions", ablation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail.str() << " (" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)"
              << std::defaultfloat << std::setprecision(6) << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
