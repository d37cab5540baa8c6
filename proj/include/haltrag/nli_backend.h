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

#ifndef HALTRAG_NLI_BACKEND_H_
#define HALTRAG_NLI_BACKEND_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>

#include "haltrag/text.h"

namespace haltrag {

// Class probabilities for one premise/hypothesis window pair.
struct NliDistribution {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;

  double Sum() const { return entail + neutral + contradict; }
  // Components in [0, 1] and summing to 1 within `tol`.
  bool IsValid(double tol = 1e-6) const;

  friend bool operator==(const NliDistribution&, const NliDistribution&) = default;
};

struct BackendId {
  std::string name;
  std::string version;

  friend bool operator==(const BackendId&, const BackendId&) = default;
};

struct ScoreKey {
  std::string example_id;
  size_t premise_window = 0;
  size_t hypothesis_window = 0;

  friend auto operator<=>(const ScoreKey&, const ScoreKey&) = default;
};

std::string ToString(const ScoreKey& key);

struct ScoreTable {
  BackendId backend;
  std::map<ScoreKey, NliDistribution> scores;
  // Records whose sum was off by more than 1e-12 and had to be rescaled.
  size_t renormalized = 0;
};

// Tolerance on the distribution sum accepted by LoadScoreTable.
inline constexpr double kScoreSumTolerance = 1e-4;

// Parses a `#halt-nli-v1` score file.
ScoreTable LoadScoreTable(const std::filesystem::path& path);
ScoreTable ParseScoreTable(std::istream& in, const std::string& source_name);
// Writes records sorted by key, probabilities with 17 significant digits.
void WriteScoreTable(const ScoreTable& table, const std::filesystem::path& path);
void WriteScoreTable(const ScoreTable& table, std::ostream& out);

// One scoring request. The key identifies the pair for table-backed
// implementations; the token spans carry the window text itself.
struct ScoreRequest {
  ScoreKey key;
  std::span<const Token> premise;
  std::span<const Token> hypothesis;
};

// Scoring contract for a frozen NLI model. Implementations must be
// deterministic and callable concurrently.
class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual const BackendId& id() const = 0;
  virtual NliDistribution Score(const ScoreRequest& request) const = 0;
};

// Serves precomputed scores; absent keys raise kMissingScore.
class LookupBackend : public NliBackend {
 public:
  explicit LookupBackend(ScoreTable table) : table_(std::move(table)) {}

  const BackendId& id() const override { return table_.backend; }
  NliDistribution Score(const ScoreRequest& request) const override;
  const ScoreTable& table() const { return table_; }

 private:
  ScoreTable table_;
};

// Model-free scorer driven by lexical overlap:
//   entail     = clamp(1.2 * jaccard, 0.02, 0.96) + noise, |noise| <= 0.02
//   contradict = (1 - entail) * novel / (novel + 2)
//   neutral    = remainder
// where `novel` counts hypothesis tokens absent from the premise and the
// noise is a hash of (seed, premise, hypothesis). Never fails.
class SyntheticBackend : public NliBackend {
 public:
  explicit SyntheticBackend(uint64_t seed,
                            BackendId id = {"synthetic", "1"});

  const BackendId& id() const override { return id_; }
  NliDistribution Score(const ScoreRequest& request) const override;

 private:
  uint64_t seed_;
  BackendId id_;
};

}  // namespace haltrag

#endif  // HALTRAG_NLI_BACKEND_H_
