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

#ifndef HALTRAG_CORPUS_H_
#define HALTRAG_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "haltrag/nli_backend.h"

namespace haltrag {

enum class Task { kSummarization, kQa, kDialogue, kSynthetic };

std::string_view TaskName(Task task);
// Throws kConfiguration on an unknown name.
Task ParseTask(std::string_view name);

// Label 1 = hallucinated, 0 = faithful.
struct LabeledExample {
  std::string id;
  std::string source_text;
  std::string generated_text;
  int label = 0;
  Task task = Task::kSynthetic;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Throws kInput if ids repeat, a label is not 0/1, or a text is blank.
void ValidateExamples(std::span<const LabeledExample> examples);

// Reads a HaluEval line-delimited file. Each record yields the faithful
// pairing "<line>_neg" (label 0) followed by the hallucinated pairing
// "<line>_pos" (label 1); <line> is the zero-based line index.
std::vector<LabeledExample> LoadHaluEval(const std::filesystem::path& path,
                                         Task task);
std::vector<LabeledExample> ParseHaluEval(std::istream& in, Task task,
                                          const std::string& source_name);

// Canonical example files: one JSON object per line with keys
// id, source, generated, label, task.
std::vector<LabeledExample> LoadExamples(const std::filesystem::path& path);
void SaveExamples(std::span<const LabeledExample> examples,
                  const std::filesystem::path& path);

// HaluEval reader for the three benchmark tasks, canonical reader for
// Task::kSynthetic.
std::vector<LabeledExample> LoadDataset(const std::filesystem::path& path,
                                        Task task);

// Desk-scale dataset with planted signal, plus score tables for two
// backends keyed by the windows the extractor will request.
struct SyntheticDataset {
  std::vector<LabeledExample> examples;
  ScoreTable scores_a;
  ScoreTable scores_b;
};

SyntheticDataset GenerateSynthetic(size_t n, uint64_t seed);

inline constexpr int kFeatureLayoutVersion = 1;

// n x dim matrix in row-major order. `columns` names the columns of the full
// 17-wide layout that survive the mask the matrix was extracted with.
struct FeatureMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<size_t> columns;
  int layout_version = kFeatureLayoutVersion;

  size_t rows() const { return ids.size(); }
  size_t dim() const { return columns.size(); }
  std::span<const double> row(size_t i) const {
    return std::span<const double>(values).subspan(i * dim(), dim());
  }
  void AppendRow(std::string id, std::span<const double> row, int label);

  // Keeps only the given full-layout columns; throws kConfiguration if one is
  // missing from this matrix.
  FeatureMatrix SelectColumns(std::span<const size_t> full_columns) const;

  // Throws kFormat on a shape or finiteness violation.
  void Validate() const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

// Line-delimited text:
//   #halt-features <layout_version> rows=<n> dim=<d>
//   #columns <c0> <c1> ...
//   <id>\t<label>\t<v0>\t...\t<v(d-1)>
// Values are written as shortest round-trip decimals.
void SaveFeatures(const FeatureMatrix& matrix, const std::filesystem::path& path);
void SaveFeatures(const FeatureMatrix& matrix, std::ostream& out);
FeatureMatrix LoadFeatures(const std::filesystem::path& path);
FeatureMatrix ParseFeatures(std::istream& in, const std::string& source_name);

}  // namespace haltrag

#endif  // HALTRAG_CORPUS_H_
