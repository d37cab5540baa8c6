// Copyright 2026 The HALT-RAG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "haltrag/pipeline.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "haltrag/error.h"
#include "json.hpp"
#include "oracles.h"

namespace haltrag {
namespace {

namespace fs = std::filesystem;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kArgument;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const auto dir = fs::path(testing::TempDir()) / ("haltrag_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Config, DefaultsPerTask) {
  const auto s = ResolveConfig({{"task", "summarization"}});
  EXPECT_EQ(s.classifier, ClassifierKind::kLogReg);
  EXPECT_EQ(s.calibration, CalibrationMethod::kIsotonic);
  EXPECT_EQ(s.k, 5u);
  EXPECT_DOUBLE_EQ(s.precision_floor, 0.70);
  const auto q = ResolveConfig({{"task", "qa"}});
  EXPECT_EQ(q.classifier, ClassifierKind::kLinearSvc);
  EXPECT_EQ(q.calibration, CalibrationMethod::kPlatt);
  const auto o = ResolveConfig({{"task", "qa"}, {"classifier", "logreg"}}, {{"k", "7"}});
  EXPECT_EQ(o.classifier, ClassifierKind::kLogReg);
  EXPECT_EQ(o.k, 7u);
  EXPECT_EQ(ResolveConfig({{"seed", "1"}}, {{"seed", "9"}}).seed, 9u);
}

TEST(Config, Errors) {
  EXPECT_EQ(KindOf([] { ResolveConfig({{"bogus", "1"}}); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { ResolveConfig({{"task", "poetry"}}); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { ResolveConfig({{"mask", "drop-all"}}); }), ErrorKind::kConfiguration);
  EXPECT_EQ(KindOf([] { AblationByName("no-such-variant"); }), ErrorKind::kConfiguration);
}

TEST(Config, SettingsFile) {
  std::istringstream in("# comment\n task = qa \n\nseed=3\n");
  const auto s = ParseSettings(in, "mem");
  EXPECT_EQ(s.at("task"), "qa");
  EXPECT_EQ(ResolveConfig(s).seed, 3u);
  std::istringstream bad("no equals sign\n");
  EXPECT_THROW(ParseSettings(bad, "mem"), Error);
}

TEST(MetricKey, Format) {
  EXPECT_EQ(MetricKey("precision", 0.7), "precision_at_prec_ge_0.70");
  EXPECT_EQ(MetricKey("f1", 0.85), "f1_at_prec_ge_0.85");
}

class PipelineRun : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(Scratch("run"));
    RunConfig c = ResolveConfig({{"task", "synthetic"}, {"n", "100"}, {"seed", "3"}});
    c.output = *dir_ / "data";
    CmdSynth(c);
  }
  static void TearDownTestSuite() { delete dir_; }

  static RunConfig ExtractConfig(const std::string& mask, const fs::path& out) {
    return ResolveConfig({{"task", "synthetic"},
                          {"seed", "3"},
                          {"in", (*dir_ / "data" / "dataset.jsonl").string()},
                          {"scores-a", (*dir_ / "data" / "scores_a.tsv").string()},
                          {"scores-b", (*dir_ / "data" / "scores_b.tsv").string()},
                          {"mask", mask},
                          {"out", out.string()}});
  }

  static fs::path* dir_;
};

fs::path* PipelineRun::dir_ = nullptr;

TEST_F(PipelineRun, ExtractShapes) {
  const auto full = CmdExtract(ExtractConfig("none", *dir_ / "full.features"));
  EXPECT_EQ(full.rows(), 100u);
  EXPECT_EQ(full.dim(), 17u);
  const auto lex = CmdExtract(ExtractConfig("drop-lexical", *dir_ / "lex.features"));
  EXPECT_EQ(lex.dim(), 12u);
  EXPECT_EQ(LoadFeatures(*dir_ / "lex.features"), lex);

  auto missing = ExtractConfig("none", *dir_ / "x.features");
  std::ofstream(*dir_ / "empty.tsv") << "#halt-nli-v1 m 1\n";
  missing.scores_a = (*dir_ / "empty.tsv").string();
  EXPECT_EQ(KindOf([&] { CmdExtract(missing); }), ErrorKind::kMissingScore);

  auto synthetic = ExtractConfig("none", *dir_ / "syn.features");
  synthetic.scores_a = synthetic.scores_b = "synthetic";
  EXPECT_EQ(CmdExtract(synthetic).dim(), 17u);
}

TEST_F(PipelineRun, EvaluateIsReproducibleAndSelfConsistent) {
  CmdExtract(ExtractConfig("none", *dir_ / "eval.features"));
  RunConfig c = ResolveConfig({{"task", "synthetic"},
                               {"seed", "3"},
                               {"in", (*dir_ / "eval.features").string()},
                               {"out", (*dir_ / "eval").string()}});
  const auto art = CmdEvaluate(c);
  const std::string pred = Slurp(art.predictions_path);
  const std::string meta_text = Slurp(art.meta_path);
  const std::string model = Slurp(art.model_path);
  CmdEvaluate(c);
  EXPECT_EQ(Slurp(art.predictions_path), pred);
  EXPECT_EQ(Slurp(art.meta_path), meta_text);
  EXPECT_EQ(Slurp(art.model_path), model);
  EXPECT_EQ(art.predictions_path.filename(), "synthetic_oof_calibrated_pred.jsonl");
  EXPECT_EQ(art.meta_path.filename(), "synthetic_oof_meta.json");

  const auto meta = nlohmann::json::parse(meta_text);
  for (const char* key : {"precision_at_prec_ge_0.70", "recall_at_prec_ge_0.70",
                          "f1_at_prec_ge_0.70", "accuracy_at_prec_ge_0.70", "threshold",
                          "roc_auc", "ece", "n", "seed", "config"}) {
    EXPECT_TRUE(meta.contains(key)) << key;
  }

  std::vector<double> probs;
  std::vector<int> labels;
  std::istringstream lines(pred);
  std::string line;
  while (std::getline(lines, line)) {
    const auto rec = nlohmann::json::parse(line);
    EXPECT_TRUE(rec.contains("id") && rec.contains("raw_score"));
    probs.push_back(rec.at("calibrated_prob").get<double>());
    labels.push_back(rec.at("label").get<int>());
  }
  ASSERT_EQ(probs.size(), 100u);
  const auto scan = oracle::ExhaustiveThresholdScan(probs, labels, 0.70);
  ASSERT_TRUE(scan.feasible);
  const auto counts = oracle::CountAt(probs, labels, scan.threshold);
  EXPECT_NEAR(meta["threshold"].get<double>(), scan.threshold, 1e-12);
  EXPECT_NEAR(meta["precision_at_prec_ge_0.70"].get<double>(), oracle::PrecisionOf(counts), 1e-12);
  EXPECT_NEAR(meta["recall_at_prec_ge_0.70"].get<double>(), oracle::RecallOf(counts), 1e-12);
  EXPECT_NEAR(meta["f1_at_prec_ge_0.70"].get<double>(), oracle::F1Of(counts), 1e-12);
  EXPECT_NEAR(meta["roc_auc"].get<double>(), oracle::ConcordanceAuc(probs, labels), 1e-12);
  EXPECT_TRUE(fs::exists(art.plots_dir / "pr_curve.tsv"));
  EXPECT_TRUE(fs::exists(art.plots_dir / "risk_coverage.tsv"));
}

TEST_F(PipelineRun, AblateWritesOneRowPerVariant) {
  CmdExtract(ExtractConfig("none", *dir_ / "abl.features"));
  RunConfig c = ResolveConfig({{"task", "synthetic"},
                               {"seed", "3"},
                               {"in", (*dir_ / "abl.features").string()},
                               {"out", (*dir_ / "abl").string()}});
  const auto rows = CmdAblate(c);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].variant, "full");
  EXPECT_EQ(rows[0].dim, 17u);
  EXPECT_EQ(rows[4].dim, 11u);
  std::istringstream tsv(Slurp(*dir_ / "abl" / "ablation.tsv"));
  std::string line;
  size_t count = 0;
  while (std::getline(tsv, line)) ++count;
  EXPECT_EQ(count, 6u);  // header + 5 rows
  c.variants = {"no-lexical"};
  EXPECT_EQ(CmdAblate(c).size(), 1u);
}

}  // namespace
}  // namespace haltrag
