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

#ifndef HALTRAG_FEATURES_H_
#define HALTRAG_FEATURES_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "haltrag/corpus.h"
#include "haltrag/nli_backend.h"

namespace haltrag {

inline constexpr size_t kFeatureDim = 17;

// Column layout of the full feature vector.
//   0-5   backend A: max_e max_n max_c mean_e mean_n mean_c
//   6-11  backend B: same order
//   12    source token count
//   13    hypothesis token count
//   14    hypothesis/source length ratio
//   15    ROUGE-L F-measure
//   16    Jaccard similarity
namespace feature {
inline constexpr size_t kBackendA = 0;
inline constexpr size_t kBackendB = 6;
inline constexpr size_t kSourceLength = 12;
inline constexpr size_t kHypothesisLength = 13;
inline constexpr size_t kLengthRatio = 14;
inline constexpr size_t kRougeL = 15;
inline constexpr size_t kJaccard = 16;
}  // namespace feature

std::string_view FeatureName(size_t column);

using PooledScores = std::array<double, 6>;

// (max_e, max_n, max_c, mean_e, mean_n, mean_c). Throws kDegenerateInput on an
// empty list and kValidation on an invalid distribution.
PooledScores PoolDistributions(std::span<const NliDistribution> scores);

enum class BackendSlot { kA, kB };

struct FeatureMask {
  bool drop_contradiction = false;
  bool drop_entailment = false;
  bool drop_lexical = false;
  std::optional<BackendSlot> single_backend;

  // Surviving columns of the full layout, ascending.
  std::vector<size_t> KeptColumns() const;
  size_t Dimension() const { return KeptColumns().size(); }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

// Comma-separated flags: "drop-contradiction", "drop-entailment",
// "drop-lexical", "single-a", "single-b". Empty or "none" is the full mask.
FeatureMask ParseFeatureMask(std::string_view text);
std::string ToString(const FeatureMask& mask);

std::vector<double> ApplyMask(std::span<const double> full,
                              const FeatureMask& mask);

struct FeatureVector {
  std::vector<double> values;
  // Set when an empty text was replaced by the placeholder token.
  bool placeholder_used = false;
};

inline constexpr std::string_view kPlaceholderToken = "<empty>";

// Scores every (premise window, hypothesis window) pair with both backends,
// pools per backend, appends lexical features and applies the mask.
// Backend failures are rethrown with the example id attached.
FeatureVector BuildFeatureVector(const LabeledExample& example,
                                 const NliBackend& backend_a,
                                 const NliBackend& backend_b,
                                 const FeatureMask& mask = {});

// Extracts one row per example.
FeatureMatrix ExtractFeatures(std::span<const LabeledExample> examples,
                              const NliBackend& backend_a,
                              const NliBackend& backend_b,
                              const FeatureMask& mask = {});

// Every (premise, hypothesis) window key the extractor will request for an
// example; used to check score-file completeness.
std::vector<ScoreKey> RequiredScoreKeys(const LabeledExample& example);

}  // namespace haltrag

#endif  // HALTRAG_FEATURES_H_
