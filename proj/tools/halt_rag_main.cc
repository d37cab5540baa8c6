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

// Command-line driver: synth, extract, evaluate, ablate.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "haltrag/error.h"
#include "haltrag/pipeline.h"

namespace {

struct FlagSet {
  std::map<std::string, std::string> values;
  std::string config_path;
};

void AddRunFlags(CLI::App* cmd, FlagSet* flags, bool with_variants) {
  static const char* kKeys[][2] = {
      {"task", "summarization | qa | dialogue | synthetic"},
      {"classifier", "logreg | linear_svc (default per task)"},
      {"calibration", "isotonic | platt (default per task)"},
      {"k", "number of folds (default 5)"},
      {"seed", "run seed (default 0)"},
      {"precision-floor", "minimum precision for the threshold (default 0.70)"},
      {"coverage", "coverage target for abstention (default 0.90)"},
      {"mask", "comma list: drop-contradiction, drop-entailment, drop-lexical, "
               "single-a, single-b"},
      {"scores-a", "score file for backend A, or 'synthetic'"},
      {"scores-b", "score file for backend B, or 'synthetic'"},
      {"in", "input path"},
      {"out", "output path"},
      {"stratified", "stratified folds (true/false)"},
      {"n", "synthetic dataset size (synth only)"},
  };
  for (const auto& [key, help] : kKeys) {
    cmd->add_option_function<std::string>(
        std::string("--") + key,
        [flags, k = std::string(key)](const std::string& v) { flags->values[k] = v; },
        help);
  }
  if (with_variants) {
    cmd->add_option_function<std::string>(
        "--variants",
        [flags](const std::string& v) { flags->values["variants"] = v; },
        "comma list of full, no-contradiction, no-entailment, no-lexical, "
        "single-backend");
  }
  cmd->add_option("--config", flags->config_path, "key=value config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-hoc hallucination verification pipeline"};
  app.require_subcommand(1);

  FlagSet flags;
  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic dataset and score files");
  auto* extract = app.add_subcommand("extract", "Extract the feature matrix");
  auto* evaluate = app.add_subcommand("evaluate", "Run OOF training, calibration and evaluation");
  auto* ablate = app.add_subcommand("ablate", "Evaluate the feature ablation variants");
  AddRunFlags(synth, &flags, false);
  AddRunFlags(extract, &flags, false);
  AddRunFlags(evaluate, &flags, false);
  AddRunFlags(ablate, &flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    haltrag::Settings base;
    if (!flags.config_path.empty()) base = haltrag::LoadSettings(flags.config_path);
    const haltrag::RunConfig config = haltrag::ResolveConfig(base, flags.values);

    if (synth->parsed()) {
      haltrag::CmdSynth(config);
      std::cout << "wrote " << config.synth_n << " examples to "
                << config.output.string() << '\n';
    } else if (extract->parsed()) {
      const auto m = haltrag::CmdExtract(config);
      std::cout << "wrote " << m.rows() << "x" << m.dim() << " feature matrix to "
                << config.output.string() << '\n';
    } else if (evaluate->parsed()) {
      const auto art = haltrag::CmdEvaluate(config);
      const auto& r = art.report;
      std::cout << "threshold=" << r.policy.threshold << " precision=" << r.precision
                << " recall=" << r.recall << " f1=" << r.f1
                << " accuracy=" << r.accuracy << " roc_auc=" << r.roc.auc
                << " ece=" << r.ece << '\n';
      if (r.selective) {
        std::cout << "selective coverage=" << r.selective->realized_coverage
                  << " precision=" << r.selective->precision
                  << " f1=" << r.selective->f1 << '\n';
      }
    } else if (ablate->parsed()) {
      for (const auto& row : haltrag::CmdAblate(config)) {
        std::cout << row.variant << " dim=" << row.dim << " precision=" << row.precision
                  << " recall=" << row.recall << " f1=" << row.f1 << '\n';
      }
    }
  } catch (const haltrag::Error& e) {
    std::cerr << "halt_rag: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
