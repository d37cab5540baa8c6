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

#include "haltrag/nli_backend.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"
#include "haltrag/rng.h"

namespace haltrag {
namespace {

constexpr std::string_view kHeaderTag = "#halt-nli-v1";

uint64_t HashTokens(uint64_t h, std::span<const Token> tokens) {
  for (const auto& t : tokens) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;  // token separator
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

bool NliDistribution::IsValid(double tol) const {
  for (double p : {entail, neutral, contradict}) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) return false;
  }
  return std::abs(Sum() - 1.0) <= tol;
}

std::string ToString(const ScoreKey& key) {
  return "(" + key.example_id + ", p=" + std::to_string(key.premise_window) +
         ", h=" + std::to_string(key.hypothesis_window) + ")";
}

ScoreTable ParseScoreTable(std::istream& in, const std::string& source_name) {
  ScoreTable table;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  const auto where = [&] {
    return source_name + ":" + std::to_string(line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      const auto parts = SplitView(line, ' ');
      if (parts.size() != 3 || parts[0] != kHeaderTag || parts[1].empty() ||
          parts[2].empty()) {
        throw Error(ErrorKind::kFormat,
                    where() + ": expected header '#halt-nli-v1 <name> <version>'");
      }
      table.backend = {std::string(parts[1]), std::string(parts[2])};
      have_header = true;
      continue;
    }
    if (Trim(line).empty()) continue;
    const auto fields = SplitView(line, '\t');
    if (fields.size() != 6) {
      throw Error(ErrorKind::kFormat,
                  where() + ": expected 6 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    ScoreKey key;
    key.example_id = std::string(fields[0]);
    const auto p_idx = ParseInt(fields[1]);
    const auto h_idx = ParseInt(fields[2]);
    if (key.example_id.empty() || !p_idx || !h_idx || *p_idx < 0 || *h_idx < 0) {
      throw Error(ErrorKind::kFormat, where() + ": malformed key fields");
    }
    key.premise_window = static_cast<size_t>(*p_idx);
    key.hypothesis_window = static_cast<size_t>(*h_idx);
    double probs[3];
    for (int c = 0; c < 3; ++c) {
      const auto v = ParseDouble(fields[3 + c]);
      if (!v) {
        throw Error(ErrorKind::kFormat, where() + ": malformed probability '" +
                                            std::string(fields[3 + c]) + "'");
      }
      if (!std::isfinite(*v) || *v < 0.0) {
        throw Error(ErrorKind::kValidation,
                    where() + ": probability outside [0, 1]");
      }
      probs[c] = *v;
    }
    NliDistribution d{probs[0], probs[1], probs[2]};
    const double sum = d.Sum();
    if (std::abs(sum - 1.0) > kScoreSumTolerance) {
      throw Error(ErrorKind::kValidation,
                  where() + ": distribution sums to " + FormatDigits17(sum));
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      d.entail /= sum;
      d.neutral /= sum;
      d.contradict /= sum;
      ++table.renormalized;
    }
    if (!table.scores.emplace(key, d).second) {
      throw Error(ErrorKind::kFormat, where() + ": duplicate key " + ToString(key));
    }
  }
  if (!have_header) {
    throw Error(ErrorKind::kFormat, source_name + ": missing #halt-nli-v1 header");
  }
  return table;
}

ScoreTable LoadScoreTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open score file " + path.string());
  return ParseScoreTable(in, path.string());
}

void WriteScoreTable(const ScoreTable& table, std::ostream& out) {
  out << kHeaderTag << ' ' << table.backend.name << ' '
      << table.backend.version << '\n';
  for (const auto& [key, d] : table.scores) {
    out << key.example_id << '\t' << key.premise_window << '\t'
        << key.hypothesis_window << '\t' << FormatDigits17(d.entail) << '\t'
        << FormatDigits17(d.neutral) << '\t' << FormatDigits17(d.contradict)
        << '\n';
  }
}

void WriteScoreTable(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write score file " + path.string());
  WriteScoreTable(table, out);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

NliDistribution LookupBackend::Score(const ScoreRequest& request) const {
  auto it = table_.scores.find(request.key);
  if (it == table_.scores.end()) {
    throw Error(ErrorKind::kMissingScore,
                "backend " + table_.backend.name + " has no score for " +
                    ToString(request.key));
  }
  return it->second;
}

SyntheticBackend::SyntheticBackend(uint64_t seed, BackendId id)
    : seed_(seed), id_(std::move(id)) {}

NliDistribution SyntheticBackend::Score(const ScoreRequest& request) const {
  const auto& premise = request.premise;
  const auto& hypothesis = request.hypothesis;
  const double overlap =
      premise.empty() || hypothesis.empty() ? 0.0 : Jaccard(premise, hypothesis);

  uint64_t h = SplitMix64(seed_) ^ 0xcbf29ce484222325ULL;
  h = HashTokens(h, premise);
  h ^= 0xff;
  h = HashTokens(h, hypothesis);
  const double unit = static_cast<double>(SplitMix64(h) >> 11) * 0x1.0p-53;
  const double noise = (unit * 2.0 - 1.0) * 0.02;

  const double entail =
      std::clamp(std::clamp(1.2 * overlap, 0.02, 0.96) + noise, 0.0, 1.0);

  std::unordered_set<std::string_view> premise_set(premise.begin(), premise.end());
  size_t novel = 0;
  for (const auto& t : hypothesis) novel += premise_set.count(t) == 0;
  const double novel_d = static_cast<double>(novel);
  const double contradict = (1.0 - entail) * novel_d / (novel_d + 2.0);
  const double neutral = std::max(0.0, 1.0 - entail - contradict);

  const double sum = entail + neutral + contradict;
  return {entail / sum, neutral / sum, contradict / sum};
}

}  // namespace haltrag
