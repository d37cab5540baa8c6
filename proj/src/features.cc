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

#include "haltrag/features.h"

#include <algorithm>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"

namespace haltrag {
namespace {

constexpr std::string_view kFeatureNames[kFeatureDim] = {
    "a_max_entail",  "a_max_neutral",  "a_max_contradict",
    "a_mean_entail", "a_mean_neutral", "a_mean_contradict",
    "b_max_entail",  "b_max_neutral",  "b_max_contradict",
    "b_mean_entail", "b_mean_neutral", "b_mean_contradict",
    "source_tokens", "hypothesis_tokens", "length_ratio",
    "rouge_l_f",     "jaccard"};

TokenList TokenizeOrPlaceholder(std::string_view text, bool* placeholder) {
  TokenList tokens = Tokenize(text);
  if (tokens.empty()) {
    tokens.emplace_back(kPlaceholderToken);
    *placeholder = true;
  }
  return tokens;
}

NliDistribution ScoreTagged(const NliBackend& backend, const ScoreRequest& req) {
  try {
    return backend.Score(req);
  } catch (const Error& e) {
    throw Error(e.kind(), "example '" + req.key.example_id + "': " + e.detail());
  }
}

}  // namespace

std::string_view FeatureName(size_t column) {
  return column < kFeatureDim ? kFeatureNames[column] : "unknown";
}

PooledScores PoolDistributions(std::span<const NliDistribution> scores) {
  if (scores.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "cannot pool an empty score list");
  }
  PooledScores out{};
  double sum[3] = {0.0, 0.0, 0.0};
  for (const auto& d : scores) {
    if (!d.IsValid()) {
      throw Error(ErrorKind::kValidation, "invalid NLI distribution in pooling");
    }
    const double v[3] = {d.entail, d.neutral, d.contradict};
    for (int c = 0; c < 3; ++c) {
      out[c] = std::max(out[c], v[c]);
      sum[c] += v[c];
    }
  }
  const auto k = static_cast<double>(scores.size());
  for (int c = 0; c < 3; ++c) {
    // Guard against the mean rounding above the max for constant columns.
    out[3 + c] = std::min(sum[c] / k, out[c]);
  }
  return out;
}

std::vector<size_t> FeatureMask::KeptColumns() const {
  std::vector<bool> keep(kFeatureDim, true);
  for (size_t base : {feature::kBackendA, feature::kBackendB}) {
    if (drop_entailment) keep[base + 0] = keep[base + 3] = false;
    if (drop_contradiction) keep[base + 2] = keep[base + 5] = false;
  }
  if (single_backend) {
    const size_t drop =
        *single_backend == BackendSlot::kA ? feature::kBackendB : feature::kBackendA;
    for (size_t j = 0; j < 6; ++j) keep[drop + j] = false;
  }
  if (drop_lexical) {
    for (size_t j = feature::kSourceLength; j < kFeatureDim; ++j) keep[j] = false;
  }
  std::vector<size_t> cols;
  for (size_t j = 0; j < kFeatureDim; ++j) {
    if (keep[j]) cols.push_back(j);
  }
  return cols;
}

FeatureMask ParseFeatureMask(std::string_view text) {
  FeatureMask mask;
  text = Trim(text);
  if (text.empty() || text == "none") return mask;
  for (auto part : SplitView(text, ',')) {
    part = Trim(part);
    if (part == "drop-contradiction") {
      mask.drop_contradiction = true;
    } else if (part == "drop-entailment") {
      mask.drop_entailment = true;
    } else if (part == "drop-lexical") {
      mask.drop_lexical = true;
    } else if (part == "single-a") {
      mask.single_backend = BackendSlot::kA;
    } else if (part == "single-b") {
      mask.single_backend = BackendSlot::kB;
    } else {
      throw Error(ErrorKind::kConfiguration,
                  "unknown mask flag '" + std::string(part) + "'");
    }
  }
  return mask;
}

std::string ToString(const FeatureMask& mask) {
  std::string out;
  const auto add = [&out](std::string_view s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  if (mask.drop_contradiction) add("drop-contradiction");
  if (mask.drop_entailment) add("drop-entailment");
  if (mask.drop_lexical) add("drop-lexical");
  if (mask.single_backend) {
    add(*mask.single_backend == BackendSlot::kA ? "single-a" : "single-b");
  }
  return out.empty() ? "none" : out;
}

std::vector<double> ApplyMask(std::span<const double> full,
                              const FeatureMask& mask) {
  if (full.size() != kFeatureDim) {
    throw Error(ErrorKind::kInput, "mask expects a full 17-wide vector");
  }
  std::vector<double> out;
  for (size_t c : mask.KeptColumns()) out.push_back(full[c]);
  return out;
}

FeatureVector BuildFeatureVector(const LabeledExample& example,
                                 const NliBackend& backend_a,
                                 const NliBackend& backend_b,
                                 const FeatureMask& mask) {
  FeatureVector result;
  const TokenList source =
      TokenizeOrPlaceholder(example.source_text, &result.placeholder_used);
  const TokenList hypothesis =
      TokenizeOrPlaceholder(example.generated_text, &result.placeholder_used);

  const auto premise_windows = MakeWindows(source.size());
  const auto hypothesis_windows = MakeWindows(hypothesis.size());

  std::vector<NliDistribution> scores_a, scores_b;
  scores_a.reserve(premise_windows.size() * hypothesis_windows.size());
  scores_b.reserve(scores_a.capacity());
  for (size_t p = 0; p < premise_windows.size(); ++p) {
    for (size_t h = 0; h < hypothesis_windows.size(); ++h) {
      ScoreRequest req{ScoreKey{example.id, p, h},
                       Slice(source, premise_windows[p]),
                       Slice(hypothesis, hypothesis_windows[h])};
      scores_a.push_back(ScoreTagged(backend_a, req));
      scores_b.push_back(ScoreTagged(backend_b, req));
    }
  }

  std::array<double, kFeatureDim> full{};
  const auto pooled_a = PoolDistributions(scores_a);
  const auto pooled_b = PoolDistributions(scores_b);
  std::copy(pooled_a.begin(), pooled_a.end(), full.begin() + feature::kBackendA);
  std::copy(pooled_b.begin(), pooled_b.end(), full.begin() + feature::kBackendB);

  const auto n_source = static_cast<double>(source.size());
  const auto n_hypothesis = static_cast<double>(hypothesis.size());
  full[feature::kSourceLength] = n_source;
  full[feature::kHypothesisLength] = n_hypothesis;
  full[feature::kLengthRatio] = n_hypothesis / std::max(n_source, 1.0);
  full[feature::kRougeL] = ComputeRougeL(source, hypothesis).f_measure;
  full[feature::kJaccard] = Jaccard(source, hypothesis);

  result.values = ApplyMask(full, mask);
  return result;
}

FeatureMatrix ExtractFeatures(std::span<const LabeledExample> examples,
                              const NliBackend& backend_a,
                              const NliBackend& backend_b,
                              const FeatureMask& mask) {
  ValidateExamples(examples);
  FeatureMatrix m;
  m.columns = mask.KeptColumns();
  m.ids.reserve(examples.size());
  m.labels.reserve(examples.size());
  m.values.reserve(examples.size() * m.dim());
  for (const auto& ex : examples) {
    auto fv = BuildFeatureVector(ex, backend_a, backend_b, mask);
    m.AppendRow(ex.id, fv.values, ex.label);
  }
  return m;
}

std::vector<ScoreKey> RequiredScoreKeys(const LabeledExample& example) {
  bool unused = false;
  const size_t np =
      MakeWindows(TokenizeOrPlaceholder(example.source_text, &unused).size()).size();
  const size_t nh =
      MakeWindows(TokenizeOrPlaceholder(example.generated_text, &unused).size())
          .size();
  std::vector<ScoreKey> keys;
  for (size_t p = 0; p < np; ++p) {
    for (size_t h = 0; h < nh; ++h) keys.push_back({example.id, p, h});
  }
  return keys;
}

}  // namespace haltrag
