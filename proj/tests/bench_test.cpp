#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "shotguard/bench.hpp"
#include "shotguard/error.hpp"
#include "shotguard/image_io.hpp"
#include "shotguard/ocr.hpp"
#include "support.hpp"

using namespace shotguard;
using namespace shotguard::bench;
using shotguard::testing::TempDir;

namespace {

SampleOutcome outcome(const std::string& group, Label truth, Label predicted, double score = 0.0) {
  SampleOutcome o;
  o.id = group;
  o.group = group;
  o.truth = truth;
  o.predicted = predicted;
  o.vsi_evaluated = true;
  o.vsi_score = score;
  o.vsi_flag = predicted == Label::malicious;
  return o;
}

std::vector<SampleOutcome> from_counts(const Counts& c) {
  std::vector<SampleOutcome> out;
  for (std::size_t i = 0; i < c.tp; ++i) out.push_back(outcome("Attack", Label::malicious, Label::malicious));
  for (std::size_t i = 0; i < c.fn; ++i) out.push_back(outcome("Attack", Label::malicious, Label::benign));
  for (std::size_t i = 0; i < c.fp; ++i) out.push_back(outcome("Benign", Label::benign, Label::malicious));
  for (std::size_t i = 0; i < c.tn; ++i) out.push_back(outcome("Benign", Label::benign, Label::benign));
  return out;
}

DetectorConfig glyph_config(double tau) {
  DetectorConfig cfg;
  cfg.calibration = CalibrationResult::fixed(tau);
  cfg.rules = std::make_shared<RuleSet>(default_ruleset());
  cfg.engine = std::make_shared<GlyphEngine>();
  return cfg;
}

void write_manifest(const std::filesystem::path& path, const std::string& body) { std::ofstream(path) << body; }

}  // namespace

TEST(Metrics, WorkedExample) {
  const auto r = rates_from_counts({8, 1, 9, 2});
  EXPECT_DOUBLE_EQ(r.tpr, 0.8);
  EXPECT_DOUBLE_EQ(r.fpr, 0.1);
  EXPECT_DOUBLE_EQ(r.precision, 8.0 / 9.0);
  EXPECT_NEAR(r.f1, 0.8421, 5e-5);
  EXPECT_NEAR(r.f1, 16.0 / 19.0, 1e-15);
}

TEST(Metrics, EmptyDenominators) {
  const auto r = rates_from_counts({0, 0, 5, 0});
  EXPECT_EQ(r.tpr, 0.0);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(Metrics, IdentitiesOnRandomCounts) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Counts c{rng() % 50, rng() % 50, rng() % 50, rng() % 50};
    const auto rep = summarize(from_counts(c));
    EXPECT_EQ(rep.counts.tp, c.tp);
    EXPECT_EQ(rep.counts.fp, c.fp);
    const double tpr = c.tp + c.fn ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    const double fpr = c.fp + c.tn ? static_cast<double>(c.fp) / (c.fp + c.tn) : 0.0;
    const double prec = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double f1 = prec + tpr > 0 ? 2 * prec * tpr / (prec + tpr) : 0.0;
    EXPECT_NEAR(rep.micro.tpr, tpr, 1e-12);
    EXPECT_NEAR(rep.micro.fpr, fpr, 1e-12);
    EXPECT_NEAR(rep.micro.precision, prec, 1e-12);
    EXPECT_NEAR(rep.micro.f1, f1, 1e-12);
    for (double v : {rep.micro.tpr, rep.micro.fpr, rep.micro.precision, rep.micro.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, PerfectDetector) {
  const auto rep = summarize(from_counts({12, 0, 30, 0}));
  EXPECT_EQ(rep.micro.tpr, 1.0);
  EXPECT_EQ(rep.micro.fpr, 0.0);
  EXPECT_EQ(rep.micro.f1, 1.0);
}

TEST(Metrics, GroupsPartitionedLikeTheBenchmarkTable) {
  std::vector<SampleOutcome> o;
  const std::vector<std::string> attacks{"EIA", "Popup", "WASP", "VPI", "VWA-Adv", "SafeArena", "ImgInject", "Pop-Up"};
  for (std::size_t g = 0; g < attacks.size(); ++g) {
    for (std::size_t i = 0; i < 4; ++i)
      o.push_back(outcome(attacks[g], Label::malicious, i < g % 4 + 1 ? Label::malicious : Label::benign));
  }
  for (int i = 0; i < 10; ++i) o.push_back(outcome("Embed", Label::benign, i < 1 ? Label::malicious : Label::benign));
  for (int i = 0; i < 10; ++i) o.push_back(outcome("Screenshot", Label::benign, i < 3 ? Label::malicious : Label::benign));
  const auto rep = summarize(o);
  ASSERT_EQ(rep.groups.size(), 10u);
  EXPECT_EQ(rep.groups[0].group, "Embed");
  EXPECT_EQ(rep.groups[1].group, "Screenshot");
  EXPECT_DOUBLE_EQ(rep.groups[0].rate, 0.1);
  EXPECT_DOUBLE_EQ(rep.groups[1].rate, 0.3);
  double tpr_sum = 0.0;
  for (std::size_t i = 2; i < rep.groups.size(); ++i) {
    EXPECT_EQ(rep.groups[i].label, Label::malicious);
    EXPECT_EQ(rep.groups[i].count, 4u);
    tpr_sum += rep.groups[i].rate;
  }
  ASSERT_TRUE(rep.macro.has_value());
  EXPECT_NEAR(rep.macro->tpr, tpr_sum / 8, 1e-12);
  EXPECT_NEAR(rep.macro->fpr, 0.2, 1e-12);
}

TEST(Metrics, SingleLabelCorpusWarns) {
  const auto rep = summarize(from_counts({0, 2, 8, 0}));
  EXPECT_FALSE(rep.aggregate_f1_defined);
  EXPECT_FALSE(rep.warnings.empty());
  EXPECT_FALSE(rep.macro.has_value());
}

TEST(Metrics, OrderIndependent) {
  auto o = from_counts({5, 3, 7, 2});
  for (std::size_t i = 0; i < o.size(); ++i) o[i].vsi_score = static_cast<double>(i * 37 % 11);
  const auto a = metrics_to_json(summarize(o));
  std::reverse(o.begin(), o.end());
  auto b = summarize(o);
  std::reverse(b.samples.begin(), b.samples.end());
  EXPECT_EQ(metrics_to_json(b), a);
}

TEST(Roc, WorkedPairwiseExample) {
  const std::vector<double> ben{2, 4}, mal{1, 3};
  const auto roc = roc_sweep(ben, mal);
  EXPECT_DOUBLE_EQ(roc.auc, 0.75);
  EXPECT_DOUBLE_EQ(roc.auc, shotguard::testing::pairwise_auc(ben, mal));
}

TEST(Roc, SeparableAndIdentical) {
  EXPECT_EQ(roc_sweep(std::vector<double>{10, 11, 12}, std::vector<double>{1, 2}).auc, 1.0);
  EXPECT_EQ(roc_sweep(std::vector<double>{1, 2}, std::vector<double>{10, 11, 12}).auc, 0.0);
  EXPECT_EQ(roc_sweep(std::vector<double>{5, 5, 5}, std::vector<double>{5, 5}).auc, 0.5);
}

TEST(Roc, MatchesPairwiseOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t nb = 1 + rng() % 100, nm = 1 + rng() % 100;
    const bool ties = trial % 2 == 0;
    std::vector<double> ben(nb), mal(nm);
    for (auto& v : ben) v = ties ? static_cast<double>(rng() % 10) : static_cast<double>(rng() % 100000) / 7.0;
    for (auto& v : mal) v = ties ? static_cast<double>(rng() % 8) : static_cast<double>(rng() % 90000) / 7.0;
    if (trial % 5 == 0) mal[0] = -std::numeric_limits<double>::infinity();
    const auto roc = roc_sweep(ben, mal);
    EXPECT_NEAR(roc.auc, shotguard::testing::pairwise_auc(ben, mal), 1e-9);
    EXPECT_EQ(roc.points.front().fpr, 0.0);
    EXPECT_EQ(roc.points.front().tpr, 0.0);
    EXPECT_EQ(roc.points.back().fpr, 1.0);
    EXPECT_EQ(roc.points.back().tpr, 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      EXPECT_GE(roc.points[i].fpr, roc.points[i - 1].fpr);
      EXPECT_GE(roc.points[i].tpr, roc.points[i - 1].tpr);
    }
  }
}

TEST(Manifest, WellFormed) {
  TempDir dir("manifest");
  for (int i = 0; i < 4; ++i) write_png(Screenshot::filled(4, 4, i, i, i), dir / ("img" + std::to_string(i) + ".png"));
  write_manifest(dir / "m.csv",
                 "path,label,group\n# comment\n\nimg0.png,benign,Embed\nimg1.png,benign,Screenshot\n"
                 "img2.png,malicious,Popup\n" + (dir / "img3.png").string() + ",malicious,EIA\n");
  const auto entries = load_manifest(dir / "m.csv");
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[2].label, Label::malicious);
  EXPECT_EQ(entries[2].group, "Popup");
  EXPECT_EQ(entries[0].image_path, dir / "img0.png");
  EXPECT_EQ(entries[3].line, 7u);
}

TEST(Manifest, ReportsEveryBadLine) {
  TempDir dir("manifest");
  write_png(Screenshot::filled(4, 4, 0, 0, 0), dir / "ok.png");
  std::ofstream(dir / "notes.txt") << "hello";
  write_manifest(dir / "m.csv",
                 "ok.png,bengin,Embed\nok.png,benign\nmissing.png,benign,Embed\nnotes.txt,benign,Embed\nok.png,benign,Embed\n");
  try {
    load_manifest(dir / "m.csv");
    FAIL();
  } catch (const IngestionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 1: unknown label 'bengin'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 2:"), std::string::npos);
    EXPECT_NE(msg.find("line 3:"), std::string::npos);
    EXPECT_NE(msg.find("line 4:"), std::string::npos);
    EXPECT_EQ(msg.find("line 5:"), std::string::npos);
  }
  EXPECT_THROW(load_manifest(dir / "absent.csv"), IngestionError);
}

TEST(Evaluate, WorkersDoNotChangeResults) {
  const auto corpus = synth::generate_corpus({.benign_per_group = 6, .malicious_per_group = 3, .seed = 3});
  const auto cfg = glyph_config(400);
  const auto one = evaluate(from_images(corpus), cfg, {1});
  const auto many = evaluate(from_images(corpus), cfg, {4});
  EXPECT_EQ(metrics_to_json(one), metrics_to_json(many));
  EXPECT_EQ(one.samples.size(), corpus.size());
  EXPECT_TRUE(one.vsi_branch.has_value());
}

TEST(Evaluate, DegradedWithoutEngine) {
  const auto corpus = synth::generate_corpus({.benign_per_group = 3, .malicious_per_group = 1});
  auto cfg = glyph_config(400);
  cfg.engine = nullptr;
  const auto rep = evaluate(from_images(corpus), cfg);
  for (const auto& s : rep.samples) EXPECT_TRUE(s.degraded);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Evaluate, RejectsEmptyCorpus) {
  EXPECT_THROW(evaluate(SampleSource{}, glyph_config(400)), InvalidInput);
}

TEST(Sweep, SigmaZeroRowMatchesDirectEvaluation) {
  const auto corpus = synth::generate_corpus({.benign_per_group = 5, .malicious_per_group = 2, .seed = 9});
  const auto cfg = glyph_config(400);
  const std::vector<double> sigmas{0.0, 25.0};
  const auto rows = robustness_sweep(from_images(corpus), sigmas, 7, cfg, {2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(metrics_to_json(rows[0].report), metrics_to_json(evaluate(from_images(corpus), cfg)));
  const auto again = robustness_sweep(from_images(corpus), sigmas, 7, cfg, {3});
  EXPECT_EQ(sweep_to_json(rows), sweep_to_json(again));
  const std::vector<double> bad{-1.0};
  EXPECT_THROW(robustness_sweep(from_images(corpus), bad, 7, cfg), InvalidInput);
}

TEST(Profile, StageAccounting) {
  const auto corpus = synth::generate_corpus({.benign_per_group = 2, .malicious_per_group = 1});
  const auto t = profile_runtime(from_images(corpus), glyph_config(400));
  EXPECT_EQ(t.images, corpus.size() - 1);
  EXPECT_GT(t.warmup_seconds, 0.0);
  EXPECT_NEAR(t.total, t.vsi + t.cpr_ocr + t.apd, 1e-12);
  EXPECT_NEAR(t.proportion_vsi + t.proportion_cpr_ocr + t.proportion_apd, 1.0, 0.01);
  const auto doc = nlohmann::json::parse(timing_to_json(t));
  EXPECT_TRUE(doc.contains("proportions"));
}

TEST(Reports, JsonAndCsvShapes) {
  const auto rep = summarize(from_counts({3, 1, 4, 1}));
  const auto doc = nlohmann::json::parse(metrics_to_json(rep));
  EXPECT_EQ(doc["counts"]["tp"], 3);
  EXPECT_EQ(doc["groups"].size(), 2u);
  ASSERT_TRUE(rep.roc.has_value());
  const auto csv = roc_to_csv(*rep.roc);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "fpr,tpr,threshold");
  EXPECT_NE(metrics_table(rep).find("micro"), std::string::npos);
}
