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

#ifndef HALTRAG_PIPELINE_H_
#define HALTRAG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haltrag/calibration.h"
#include "haltrag/corpus.h"
#include "haltrag/features.h"
#include "haltrag/models.h"
#include "haltrag/oof.h"
#include "haltrag/policy.h"

namespace haltrag {

// Raw key=value settings as read from a config file or the command line.
using Settings = std::map<std::string, std::string>;

// Parses "key=value" lines; '#' starts a comment, blank lines are skipped.
Settings ParseSettings(std::istream& in, const std::string& source_name);
Settings LoadSettings(const std::filesystem::path& path);

inline constexpr std::string_view kSyntheticBackendSpec = "synthetic";

struct RunConfig {
  Task task = Task::kSummarization;
  ClassifierKind classifier = ClassifierKind::kLogReg;
  CalibrationMethod calibration = CalibrationMethod::kIsotonic;
  size_t k = 5;
  uint64_t seed = 0;
  double precision_floor = kDefaultPrecisionFloor;
  double coverage = 0.90;
  FeatureMask mask;
  std::string scores_a = std::string(kSyntheticBackendSpec);
  std::string scores_b = std::string(kSyntheticBackendSpec);
  std::filesystem::path input;
  std::filesystem::path output;
  bool stratified = false;
  size_t synth_n = 2000;
  std::vector<std::string> variants;  // ablate only; empty means all
};

// Task defaults: summarization/dialogue/synthetic use logreg + isotonic,
// qa uses linear_svc + platt. Explicit settings win over defaults; entries
// in `overrides` win over `base`. Throws kConfiguration on unknown keys or
// invalid values.
RunConfig ResolveConfig(const Settings& base, const Settings& overrides = {});

// Key/value echo of every field, used in the meta file.
Settings DescribeConfig(const RunConfig& config);

// Writes <out>/dataset.jsonl, <out>/scores_a.tsv and <out>/scores_b.tsv.
void CmdSynth(const RunConfig& config);

// Reads the dataset at config.input, scores it with both backends and writes
// the feature matrix to config.output.
FeatureMatrix CmdExtract(const RunConfig& config);

struct EvaluationArtifacts {
  FeatureMatrix features;
  OofResult oof;
  EvalReport report;
  std::filesystem::path predictions_path;
  std::filesystem::path meta_path;
  std::filesystem::path model_path;
  std::filesystem::path plots_dir;
};

// "<prefix>_at_prec_ge_<floor with two decimals>"
std::string MetricKey(std::string_view prefix, double precision_floor);

EvaluationArtifacts EvaluateFeatures(const FeatureMatrix& features,
                                     const RunConfig& config);
// Loads config.input, applies the mask and writes every artifact under
// config.output.
EvaluationArtifacts CmdEvaluate(const RunConfig& config);

struct AblationVariant {
  std::string name;
  FeatureMask mask;
};

// full, no-contradiction, no-entailment, no-lexical, single-backend (the
// second backend alone).
std::vector<AblationVariant> StandardAblations();
AblationVariant AblationByName(std::string_view name);

struct AblationRow {
  std::string variant;
  size_t dim = 0;
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Evaluates each variant into <out>/<variant>/ and writes <out>/ablation.tsv.
std::vector<AblationRow> CmdAblate(const RunConfig& config);

}  // namespace haltrag

#endif  // HALTRAG_PIPELINE_H_
