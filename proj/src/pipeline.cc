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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"
#include "haltrag/rng.h"
#include "json.hpp"

namespace haltrag {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "task", "classifier", "calibration", "k", "seed", "precision-floor",
      "coverage", "mask", "scores-a", "scores-b", "in", "out", "stratified",
      "n", "variants"};
  return keys;
}

double ParseRealSetting(const std::string& key, const std::string& value) {
  const auto v = ParseDouble(Trim(value));
  if (!v || !std::isfinite(*v)) {
    throw Error(ErrorKind::kConfiguration, key + ": not a number: '" + value + "'");
  }
  return *v;
}

uint64_t ParseUintSetting(const std::string& key, const std::string& value) {
  const auto v = ParseInt(Trim(value));
  if (!v || *v < 0) {
    throw Error(ErrorKind::kConfiguration,
                key + ": not a non-negative integer: '" + value + "'");
  }
  return static_cast<uint64_t>(*v);
}

bool ParseBoolSetting(const std::string& key, const std::string& value) {
  const auto v = Trim(value);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error(ErrorKind::kConfiguration, key + ": not a boolean: '" + value + "'");
}

std::unique_ptr<NliBackend> MakeBackend(const std::string& spec, uint64_t seed,
                                        std::string_view slot) {
  if (spec == kSyntheticBackendSpec) {
    return std::make_unique<SyntheticBackend>(
        SubstreamSeed(seed, "backend-" + std::string(slot)),
        BackendId{"synthetic-" + std::string(slot), "1"});
  }
  return std::make_unique<LookupBackend>(LoadScoreTable(spec));
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory " + dir.string());
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return FormatRoundTrip(v);
}

void WritePlots(const fs::path& dir, const EvalReport& report,
                std::span<const double> probs, std::span<const int> labels) {
  EnsureDirectory(dir);
  {
    auto out = OpenOutput(dir / "pr_curve.tsv");
    out << "threshold\tprecision\trecall\n";
    for (const auto& p : report.pr_curve) {
      out << Num(p.threshold) << '\t' << Num(p.precision) << '\t' << Num(p.recall)
          << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "roc_curve.tsv");
    out << "threshold\tfpr\ttpr\n";
    for (const auto& p : report.roc.points) {
      out << Num(p.threshold) << '\t' << Num(p.fpr) << '\t' << Num(p.tpr) << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "calibration.tsv");
    out << "bin_lower\tbin_upper\tcount\tmean_confidence\tfraction_positive\n";
    for (const auto& b : ReliabilityDiagram(probs, labels)) {
      out << Num(b.lower) << '\t' << Num(b.upper) << '\t' << b.count << '\t'
          << Num(b.mean_confidence) << '\t' << Num(b.fraction_positive) << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "risk_coverage.tsv");
    out << "coverage_target\trealized_coverage\tprecision\tf1\trisk\n";
    for (const auto& p : report.risk_coverage) {
      out << Num(p.coverage_target) << '\t' << Num(p.realized_coverage) << '\t'
          << Num(p.precision) << '\t' << Num(p.f1) << '\t'
          << Num(1.0 - p.precision) << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "operating_point.tsv");
    out << "threshold\tprecision\trecall\tfpr\n";
    const auto& c = report.confusion;
    const double fpr = c.fp + c.tn == 0
                           ? 0.0
                           : static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    out << Num(report.policy.threshold) << '\t' << Num(report.precision) << '\t'
        << Num(report.recall) << '\t' << Num(fpr) << '\n';
  }
}

}  // namespace

Settings ParseSettings(std::istream& in, const std::string& source_name) {
  Settings settings;
  std::string line;
  for (size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    std::string_view body = Trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kConfiguration,
                  source_name + ":" + std::to_string(line_no) +
                      ": expected key=value");
    }
    settings[std::string(Trim(body.substr(0, eq)))] =
        std::string(Trim(body.substr(eq + 1)));
  }
  return settings;
}

Settings LoadSettings(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  return ParseSettings(in, path.string());
}

RunConfig ResolveConfig(const Settings& base, const Settings& overrides) {
  Settings merged = base;
  for (const auto& [k, v] : overrides) merged[k] = v;
  for (const auto& [k, v] : merged) {
    if (!KnownKeys().count(k)) {
      throw Error(ErrorKind::kConfiguration, "unknown setting '" + k + "'");
    }
  }
  const auto get = [&merged](const std::string& key) -> const std::string* {
    auto it = merged.find(key);
    return it == merged.end() ? nullptr : &it->second;
  };

  RunConfig c;
  if (auto v = get("task")) c.task = ParseTask(*v);
  if (c.task == Task::kQa) {
    c.classifier = ClassifierKind::kLinearSvc;
    c.calibration = CalibrationMethod::kPlatt;
  }
  if (auto v = get("classifier")) c.classifier = ParseClassifier(*v);
  if (auto v = get("calibration")) c.calibration = ParseCalibration(*v);
  if (auto v = get("k")) {
    c.k = ParseUintSetting("k", *v);
    if (c.k < 2) throw Error(ErrorKind::kConfiguration, "k must be >= 2");
  }
  if (auto v = get("seed")) c.seed = ParseUintSetting("seed", *v);
  if (auto v = get("precision-floor")) {
    c.precision_floor = ParseRealSetting("precision-floor", *v);
    if (!(c.precision_floor > 0.0 && c.precision_floor <= 1.0)) {
      throw Error(ErrorKind::kConfiguration, "precision-floor must lie in (0, 1]");
    }
  }
  if (auto v = get("coverage")) {
    c.coverage = ParseRealSetting("coverage", *v);
    if (!(c.coverage > 0.0 && c.coverage <= 1.0)) {
      throw Error(ErrorKind::kConfiguration, "coverage must lie in (0, 1]");
    }
  }
  if (auto v = get("mask")) c.mask = ParseFeatureMask(*v);
  if (auto v = get("scores-a")) c.scores_a = *v;
  if (auto v = get("scores-b")) c.scores_b = *v;
  if (auto v = get("in")) c.input = *v;
  if (auto v = get("out")) c.output = *v;
  if (auto v = get("stratified")) c.stratified = ParseBoolSetting("stratified", *v);
  if (auto v = get("n")) c.synth_n = ParseUintSetting("n", *v);
  if (auto v = get("variants")) {
    for (auto part : SplitView(*v, ',')) {
      part = Trim(part);
      if (part.empty()) continue;
      AblationByName(part);  // validates
      c.variants.emplace_back(part);
    }
  }
  return c;
}

Settings DescribeConfig(const RunConfig& c) {
  Settings s;
  s["task"] = std::string(TaskName(c.task));
  s["classifier"] = std::string(ClassifierName(c.classifier));
  s["calibration"] = std::string(CalibrationName(c.calibration));
  s["k"] = std::to_string(c.k);
  s["seed"] = std::to_string(c.seed);
  s["precision-floor"] = FormatRoundTrip(c.precision_floor);
  s["coverage"] = FormatRoundTrip(c.coverage);
  s["mask"] = ToString(c.mask);
  s["scores-a"] = c.scores_a;
  s["scores-b"] = c.scores_b;
  s["in"] = c.input.string();
  s["out"] = c.output.string();
  s["stratified"] = c.stratified ? "true" : "false";
  return s;
}

void CmdSynth(const RunConfig& config) {
  if (config.output.empty()) throw Error(ErrorKind::kConfiguration, "synth needs --out");
  const auto data = GenerateSynthetic(config.synth_n, config.seed);
  EnsureDirectory(config.output);
  SaveExamples(data.examples, config.output / "dataset.jsonl");
  WriteScoreTable(data.scores_a, config.output / "scores_a.tsv");
  WriteScoreTable(data.scores_b, config.output / "scores_b.tsv");
}

FeatureMatrix CmdExtract(const RunConfig& config) {
  if (config.input.empty() || config.output.empty()) {
    throw Error(ErrorKind::kConfiguration, "extract needs --in and --out");
  }
  const auto examples = LoadDataset(config.input, config.task);
  const auto backend_a = MakeBackend(config.scores_a, config.seed, "a");
  const auto backend_b = MakeBackend(config.scores_b, config.seed, "b");
  FeatureMatrix m = ExtractFeatures(examples, *backend_a, *backend_b, config.mask);
  if (config.output.has_parent_path()) EnsureDirectory(config.output.parent_path());
  SaveFeatures(m, config.output);
  return m;
}

std::string MetricKey(std::string_view prefix, double precision_floor) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", precision_floor);
  return std::string(prefix) + "_at_prec_ge_" + buf;
}

EvaluationArtifacts EvaluateFeatures(const FeatureMatrix& features,
                                     const RunConfig& config) {
  if (config.output.empty()) {
    throw Error(ErrorKind::kConfiguration, "evaluate needs --out");
  }
  EvaluationArtifacts art;
  art.features = features;

  OofConfig oof_config;
  oof_config.classifier = config.classifier;
  oof_config.calibration = config.calibration;
  oof_config.k = config.k;
  oof_config.seed = config.seed;
  oof_config.stratified = config.stratified;
  art.oof = RunOof(features, oof_config);
  art.report = Evaluate(art.oof.calibrated, features.labels,
                        config.precision_floor, config.coverage);

  const std::string task(TaskName(config.task));
  EnsureDirectory(config.output);
  art.predictions_path = config.output / (task + "_oof_calibrated_pred.jsonl");
  art.meta_path = config.output / (task + "_oof_meta.json");
  art.model_path = config.output / (task + "_model.txt");
  art.plots_dir = config.output / "plots";

  {
    auto out = OpenOutput(art.predictions_path);
    for (size_t i = 0; i < features.rows(); ++i) {
      ojson rec;
      rec["id"] = features.ids[i];
      rec["raw_score"] = art.oof.raw_scores[i];
      rec["calibrated_prob"] = art.oof.calibrated[i];
      rec["label"] = features.labels[i];
      out << rec.dump() << '\n';
    }
  }

  const auto& rep = art.report;
  {
    ojson meta;
    meta["task"] = task;
    meta["n"] = features.rows();
    meta["precision_floor"] = config.precision_floor;
    meta["threshold"] = rep.policy.threshold;
    meta[MetricKey("precision", config.precision_floor)] = rep.precision;
    meta[MetricKey("recall", config.precision_floor)] = rep.recall;
    meta[MetricKey("f1", config.precision_floor)] = rep.f1;
    meta[MetricKey("accuracy", config.precision_floor)] = rep.accuracy;
    meta["roc_auc"] = rep.roc.auc;
    meta["ece"] = rep.ece;
    meta["ece_bins"] = kDefaultEceBins;
    meta["confusion"] = {{"tp", rep.confusion.tp},
                         {"fp", rep.confusion.fp},
                         {"tn", rep.confusion.tn},
                         {"fn", rep.confusion.fn}};
    if (rep.selective) {
      const auto& s = *rep.selective;
      meta["selective"] = {{"coverage_target", s.coverage_target},
                           {"realized_coverage", s.realized_coverage},
                           {"abstained", s.abstained},
                           {"precision", s.precision},
                           {"recall", s.recall},
                           {"f1", s.f1},
                           {"accuracy", s.accuracy},
                           {"precision_defined", s.precision_defined},
                           {"recall_defined", s.recall_defined}};
    }
    meta["seed"] = config.seed;
    ojson echo;
    for (const auto& [k, v] : DescribeConfig(config)) echo[k] = v;
    meta["config"] = echo;
    meta["feature_columns"] = features.columns;
    meta["final_model"] = {{"gradient_norm", art.oof.final_model.gradient_norm},
                           {"iterations", art.oof.final_model.iterations},
                           {"converged", art.oof.final_model.converged}};
    auto out = OpenOutput(art.meta_path);
    out << meta.dump(2) << '\n';
  }

  {
    auto out = OpenOutput(art.model_path);
    out << "#halt-model 1\n";
    out << "columns";
    for (size_t c : features.columns) out << ' ' << c;
    out << '\n';
    WriteModel(art.oof.final_model, out);
    WriteCalibrator(art.oof.calibrator, out);
    out << "threshold " << FormatRoundTrip(rep.policy.threshold) << '\n';
    out << "precision_floor " << FormatRoundTrip(config.precision_floor) << '\n';
  }

  WritePlots(art.plots_dir, rep, art.oof.calibrated, features.labels);
  return art;
}

EvaluationArtifacts CmdEvaluate(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorKind::kConfiguration, "evaluate needs --in");
  FeatureMatrix features = LoadFeatures(config.input);
  if (config.mask != FeatureMask{}) {
    const auto kept = config.mask.KeptColumns();
    features = features.SelectColumns(kept);
  }
  return EvaluateFeatures(features, config);
}

std::vector<AblationVariant> StandardAblations() {
  std::vector<AblationVariant> v(5);
  v[0].name = "full";
  v[1].name = "no-contradiction";
  v[1].mask.drop_contradiction = true;
  v[2].name = "no-entailment";
  v[2].mask.drop_entailment = true;
  v[3].name = "no-lexical";
  v[3].mask.drop_lexical = true;
  v[4].name = "single-backend";
  v[4].mask.single_backend = BackendSlot::kB;
  return v;
}

AblationVariant AblationByName(std::string_view name) {
  for (auto& v : StandardAblations()) {
    if (v.name == name) return v;
  }
  throw Error(ErrorKind::kConfiguration,
              "unknown ablation variant '" + std::string(name) + "'");
}

std::vector<AblationRow> CmdAblate(const RunConfig& config) {
  if (config.input.empty() || config.output.empty()) {
    throw Error(ErrorKind::kConfiguration, "ablate needs --in and --out");
  }
  const FeatureMatrix full = LoadFeatures(config.input);
  std::vector<AblationVariant> variants;
  if (config.variants.empty()) {
    variants = StandardAblations();
  } else {
    for (const auto& name : config.variants) variants.push_back(AblationByName(name));
  }

  std::vector<AblationRow> rows;
  for (const auto& variant : variants) {
    RunConfig vc = config;
    vc.mask = variant.mask;
    vc.output = config.output / variant.name;
    const auto kept = variant.mask.KeptColumns();
    const auto art = EvaluateFeatures(full.SelectColumns(kept), vc);
    rows.push_back({variant.name, kept.size(), art.report.policy.threshold,
                    art.report.precision, art.report.recall, art.report.f1});
  }

  EnsureDirectory(config.output);
  auto out = OpenOutput(config.output / "ablation.tsv");
  out << "variant\tdim\tthreshold\tprecision\trecall\tf1\n";
  for (const auto& r : rows) {
    out << r.variant << '\t' << r.dim << '\t' << Num(r.threshold) << '\t'
        << Num(r.precision) << '\t' << Num(r.recall) << '\t' << Num(r.f1) << '\n';
  }
  return rows;
}

}  // namespace haltrag
