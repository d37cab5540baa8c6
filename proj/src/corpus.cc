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

#include "haltrag/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"
#include "haltrag/rng.h"
#include "haltrag/text.h"
#include "json.hpp"

namespace haltrag {
namespace {

using json = nlohmann::json;

std::string LineRef(const std::string& source, size_t line_index) {
  return source + ":" + std::to_string(line_index + 1);
}

std::string RequireString(const json& record, const char* field,
                          const std::string& where) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) {
    throw Error(ErrorKind::kParse,
                where + ": missing required field '" + field + "'");
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    // Dialogue histories sometimes arrive as a list of turns.
    std::string joined;
    for (const auto& turn : *it) {
      if (!turn.is_string()) break;
      if (!joined.empty()) joined += '\n';
      joined += turn.get<std::string>();
    }
    return joined;
  }
  throw Error(ErrorKind::kParse,
              where + ": field '" + field + "' is not a string");
}

bool IsBlank(std::string_view s) { return Trim(s).empty(); }

// Synthetic text vocabulary: pronounceable pseudo-words.
std::string PseudoWord(size_t index) {
  static constexpr const char* kSyllables[] = {
      "ka", "to", "mi", "ra", "se", "lu", "po", "ne", "di", "fa",
      "go", "hi", "ju", "be", "wo", "zu", "qi", "ce", "xa", "yo"};
  size_t v = index + 400;
  std::string word;
  while (v > 0) {
    word += kSyllables[v % 20];
    v /= 20;
  }
  return word;
}

constexpr size_t kVocabularySize = 4000;

NliDistribution Softmax3(double e, double n, double c) {
  const double m = std::max({e, n, c});
  const double ee = std::exp(e - m), en = std::exp(n - m), ec = std::exp(c - m);
  const double z = ee + en + ec;
  return {ee / z, en / z, ec / z};
}

}  // namespace

std::string_view TaskName(Task task) {
  switch (task) {
    case Task::kSummarization: return "summarization";
    case Task::kQa: return "qa";
    case Task::kDialogue: return "dialogue";
    case Task::kSynthetic: return "synthetic";
  }
  return "unknown";
}

Task ParseTask(std::string_view name) {
  for (Task t : {Task::kSummarization, Task::kQa, Task::kDialogue,
                 Task::kSynthetic}) {
    if (TaskName(t) == name) return t;
  }
  throw Error(ErrorKind::kConfiguration, "unknown task '" + std::string(name) + "'");
}

void ValidateExamples(std::span<const LabeledExample> examples) {
  std::unordered_set<std::string_view> seen;
  for (const auto& ex : examples) {
    if (!seen.insert(ex.id).second) {
      throw Error(ErrorKind::kInput, "duplicate example id '" + ex.id + "'");
    }
    if (ex.label != 0 && ex.label != 1) {
      throw Error(ErrorKind::kInput, "example '" + ex.id + "' has label " +
                                         std::to_string(ex.label));
    }
    if (IsBlank(ex.source_text) || IsBlank(ex.generated_text)) {
      throw Error(ErrorKind::kInput, "example '" + ex.id + "' has blank text");
    }
  }
}

std::vector<LabeledExample> ParseHaluEval(std::istream& in, Task task,
                                          const std::string& source_name) {
  if (task == Task::kSynthetic) {
    throw Error(ErrorKind::kConfiguration,
                "task 'synthetic' is not a HaluEval task");
  }
  std::vector<LabeledExample> out;
  std::string line;
  for (size_t index = 0; std::getline(in, line); ++index) {
    if (IsBlank(line)) continue;
    const std::string where = LineRef(source_name, index);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, where + ": invalid JSON (" + e.what() + ")");
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::kParse, where + ": record is not an object");
    }
    std::string source, faithful, hallucinated;
    switch (task) {
      case Task::kSummarization:
        source = RequireString(record, "document", where);
        faithful = RequireString(record, "right_summary", where);
        hallucinated = RequireString(record, "hallucinated_summary", where);
        break;
      case Task::kQa:
        source = RequireString(record, "knowledge", where) + "\n" +
                 RequireString(record, "question", where);
        faithful = RequireString(record, "right_answer", where);
        hallucinated = RequireString(record, "hallucinated_answer", where);
        break;
      case Task::kDialogue:
        source = RequireString(record, "knowledge", where) + "\n" +
                 RequireString(record, "dialogue_history", where);
        faithful = RequireString(record, "right_response", where);
        hallucinated = RequireString(record, "hallucinated_response", where);
        break;
      case Task::kSynthetic:
        break;
    }
    if (IsBlank(source) || IsBlank(faithful) || IsBlank(hallucinated)) {
      throw Error(ErrorKind::kParse, where + ": blank source or output text");
    }
    const std::string base = std::to_string(index);
    out.push_back({base + "_neg", source, std::move(faithful), 0, task});
    out.push_back({base + "_pos", std::move(source), std::move(hallucinated), 1,
                   task});
  }
  return out;
}

std::vector<LabeledExample> LoadHaluEval(const std::filesystem::path& path,
                                         Task task) {
  if (task == Task::kSynthetic) {
    throw Error(ErrorKind::kConfiguration,
                "task 'synthetic' is not a HaluEval task");
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset " + path.string());
  return ParseHaluEval(in, task, path.string());
}

std::vector<LabeledExample> LoadExamples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset " + path.string());
  std::vector<LabeledExample> out;
  std::string line;
  for (size_t index = 0; std::getline(in, line); ++index) {
    if (IsBlank(line)) continue;
    const std::string where = LineRef(path.string(), index);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, where + ": invalid JSON (" + e.what() + ")");
    }
    LabeledExample ex;
    ex.id = RequireString(record, "id", where);
    ex.source_text = RequireString(record, "source", where);
    ex.generated_text = RequireString(record, "generated", where);
    auto label = record.find("label");
    if (label == record.end() || !label->is_number_integer()) {
      throw Error(ErrorKind::kParse, where + ": missing required field 'label'");
    }
    ex.label = label->get<int>();
    ex.task = ParseTask(RequireString(record, "task", where));
    out.push_back(std::move(ex));
  }
  ValidateExamples(out);
  return out;
}

void SaveExamples(std::span<const LabeledExample> examples,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& ex : examples) {
    nlohmann::ordered_json record;
    record["id"] = ex.id;
    record["source"] = ex.source_text;
    record["generated"] = ex.generated_text;
    record["label"] = ex.label;
    record["task"] = std::string(TaskName(ex.task));
    out << record.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<LabeledExample> LoadDataset(const std::filesystem::path& path,
                                        Task task) {
  if (task == Task::kSynthetic) return LoadExamples(path);
  return LoadHaluEval(path, task);
}

SyntheticDataset GenerateSynthetic(size_t n, uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorKind::kArgument, "synthetic dataset needs n >= 2");
  }
  Rng rng(SubstreamSeed(seed, "synthetic"));
  SyntheticDataset data;
  data.scores_a.backend = {"planted-a", "1"};
  data.scores_b.backend = {"planted-b", "1"};
  data.examples.reserve(n);

  const auto append_words = [&rng](std::string* text, const std::vector<std::string>& words) {
    size_t until_period = 8 + rng.UniformInt(12);
    for (size_t i = 0; i < words.size(); ++i) {
      if (i > 0) *text += ' ';
      *text += words[i];
      if (--until_period == 0 || i + 1 == words.size()) {
        *text += '.';
        until_period = 8 + rng.UniformInt(12);
      }
    }
  };

  for (size_t i = 0; i < n; ++i) {
    LabeledExample ex;
    ex.id = "syn_" + std::to_string(i);
    ex.task = Task::kSynthetic;
    ex.label = rng.Bernoulli(0.5) ? 1 : 0;

    // Each example draws from its own topic slice of the vocabulary.
    const size_t topic = rng.UniformInt(kVocabularySize - 300);
    const size_t source_len = 40 + rng.UniformInt(680);
    std::vector<std::string> source_words(source_len);
    for (auto& w : source_words) w = PseudoWord(topic + rng.UniformInt(300));

    // Faithful outputs copy more of the source; hallucinated ones invent more.
    const double support =
        ex.label == 1 ? rng.Uniform(0.35, 0.8) : rng.Uniform(0.55, 0.95);
    const size_t hyp_len = 8 + rng.UniformInt(32);
    std::vector<std::string> hyp_words(hyp_len);
    size_t cursor = rng.UniformInt(source_len);
    for (auto& w : hyp_words) {
      if (rng.Bernoulli(support)) {
        w = source_words[cursor];
        cursor = rng.Bernoulli(0.8) ? (cursor + 1) % source_len
                                    : rng.UniformInt(source_len);
      } else {
        w = PseudoWord(rng.UniformInt(kVocabularySize));
      }
    }
    append_words(&ex.source_text, source_words);
    append_words(&ex.generated_text, hyp_words);

    const size_t premise_windows =
        MakeWindows(Tokenize(ex.source_text).size()).size();
    const size_t hypothesis_windows =
        MakeWindows(Tokenize(ex.generated_text).size()).size();

    // Example-level evidence, drawn independently per backend so the second
    // backend carries information the first lacks.
    const double direction = ex.label == 1 ? -1.0 : 1.0;
    for (ScoreTable* table : {&data.scores_a, &data.scores_b}) {
      const double evidence = 0.9 * direction + rng.Normal();
      for (size_t p = 0; p < premise_windows; ++p) {
        for (size_t h = 0; h < hypothesis_windows; ++h) {
          const double e = evidence + 0.5 * rng.Normal();
          const double c = -evidence + 0.5 * rng.Normal();
          const double nn = 0.3 * rng.Normal();
          table->scores.emplace(ScoreKey{ex.id, p, h}, Softmax3(e, nn, c));
        }
      }
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

void FeatureMatrix::AppendRow(std::string id, std::span<const double> row,
                              int label) {
  if (row.size() != dim()) {
    throw Error(ErrorKind::kInput, "row width " + std::to_string(row.size()) +
                                       " != matrix dim " + std::to_string(dim()));
  }
  ids.push_back(std::move(id));
  values.insert(values.end(), row.begin(), row.end());
  labels.push_back(label);
}

FeatureMatrix FeatureMatrix::SelectColumns(
    std::span<const size_t> full_columns) const {
  std::vector<size_t> positions;
  for (size_t c : full_columns) {
    auto it = std::find(columns.begin(), columns.end(), c);
    if (it == columns.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "feature column " + std::to_string(c) +
                      " is not present in the matrix");
    }
    positions.push_back(static_cast<size_t>(it - columns.begin()));
  }
  FeatureMatrix out;
  out.layout_version = layout_version;
  out.columns.assign(full_columns.begin(), full_columns.end());
  out.ids = ids;
  out.labels = labels;
  out.values.reserve(rows() * positions.size());
  for (size_t i = 0; i < rows(); ++i) {
    const auto r = row(i);
    for (size_t p : positions) out.values.push_back(r[p]);
  }
  return out;
}

void FeatureMatrix::Validate() const {
  if (labels.size() != ids.size() || values.size() != ids.size() * dim()) {
    throw Error(ErrorKind::kFormat, "feature matrix shape mismatch");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kFormat, "non-finite feature");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorKind::kFormat, "label not in {0, 1}");
  }
}

void SaveFeatures(const FeatureMatrix& matrix, std::ostream& out) {
  matrix.Validate();
  out << "#halt-features " << matrix.layout_version << " rows=" << matrix.rows()
      << " dim=" << matrix.dim() << '\n';
  out << "#columns";
  for (size_t c : matrix.columns) out << ' ' << c;
  out << '\n';
  for (size_t i = 0; i < matrix.rows(); ++i) {
    if (matrix.ids[i].find_first_of("\t\n\r") != std::string::npos) {
      throw Error(ErrorKind::kArgument,
                  "example id contains tab or newline: " + matrix.ids[i]);
    }
    out << matrix.ids[i] << '\t' << matrix.labels[i];
    for (double v : matrix.row(i)) out << '\t' << FormatRoundTrip(v);
    out << '\n';
  }
}

void SaveFeatures(const FeatureMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  SaveFeatures(matrix, out);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

FeatureMatrix ParseFeatures(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kFormat, source_name + ": empty feature file");
  }
  const auto header = SplitView(line, ' ');
  if (header.size() != 4 || header[0] != "#halt-features" ||
      !header[2].starts_with("rows=") || !header[3].starts_with("dim=")) {
    throw Error(ErrorKind::kFormat, source_name + ": malformed header");
  }
  const auto version = ParseInt(header[1]);
  const auto rows = ParseInt(header[2].substr(5));
  const auto dim = ParseInt(header[3].substr(4));
  if (!version || !rows || !dim || *rows < 0 || *dim < 0) {
    throw Error(ErrorKind::kFormat, source_name + ": malformed header");
  }
  if (*version != kFeatureLayoutVersion) {
    throw Error(ErrorKind::kVersion,
                source_name + ": layout version " + std::to_string(*version) +
                    ", expected " + std::to_string(kFeatureLayoutVersion));
  }
  FeatureMatrix m;
  m.layout_version = static_cast<int>(*version);
  if (!std::getline(in, line) || !line.starts_with("#columns")) {
    throw Error(ErrorKind::kFormat, source_name + ": missing #columns line");
  }
  {
    std::istringstream cols(line.substr(8));
    std::string tok;
    while (cols >> tok) {
      const auto c = ParseInt(tok);
      if (!c || *c < 0) {
        throw Error(ErrorKind::kFormat, source_name + ": bad column index");
      }
      m.columns.push_back(static_cast<size_t>(*c));
    }
  }
  if (m.columns.size() != static_cast<size_t>(*dim)) {
    throw Error(ErrorKind::kFormat, source_name + ": #columns disagrees with dim");
  }
  size_t line_no = 2;
  std::vector<double> row(m.dim());
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto fields = SplitView(line, '\t');
    if (fields.size() != m.dim() + 2) {
      throw Error(ErrorKind::kFormat, where + ": expected " +
                                          std::to_string(m.dim()) +
                                          " feature values, got " +
                                          std::to_string(fields.size() < 2 ? 0 : fields.size() - 2));
    }
    const auto label = ParseInt(fields[1]);
    if (!label || (*label != 0 && *label != 1)) {
      throw Error(ErrorKind::kFormat, where + ": bad label");
    }
    for (size_t j = 0; j < m.dim(); ++j) {
      const auto v = ParseDouble(fields[j + 2]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::kFormat, where + ": bad feature value");
      }
      row[j] = *v;
    }
    m.AppendRow(std::string(fields[0]), row, static_cast<int>(*label));
  }
  if (m.rows() != static_cast<size_t>(*rows)) {
    throw Error(ErrorKind::kFormat,
                source_name + ": truncated, header promises " +
                    std::to_string(*rows) + " rows, found " +
                    std::to_string(m.rows()));
  }
  return m;
}

FeatureMatrix LoadFeatures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open feature file " + path.string());
  return ParseFeatures(in, path.string());
}

}  // namespace haltrag
