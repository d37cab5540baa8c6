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

#ifndef HALTRAG_TEXT_H_
#define HALTRAG_TEXT_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace haltrag {

using Token = std::string;
using TokenList = std::vector<Token>;

inline constexpr size_t kWindowSize = 320;

// Lowercases ASCII letters, splits on Unicode whitespace, then splits leading
// and trailing ASCII punctuation off each chunk as single-character tokens.
// Interior punctuation ("don't", "3.5") stays attached.
TokenList Tokenize(std::string_view text);

// Half-open token range [begin, begin + length).
struct TokenSpan {
  size_t begin = 0;
  size_t length = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Partitions `num_tokens` tokens into consecutive windows. Only stride == size
// is supported. Throws kDegenerateInput when num_tokens == 0.
std::vector<TokenSpan> MakeWindows(size_t num_tokens, size_t size = kWindowSize,
                                   size_t stride = kWindowSize);

std::span<const Token> Slice(const TokenList& tokens, const TokenSpan& span);

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

size_t LcsLength(std::span<const Token> a, std::span<const Token> b);

// precision = LCS/|b|, recall = LCS/|a|. Both lists must be non-empty.
RougeL ComputeRougeL(std::span<const Token> a, std::span<const Token> b);

// Intersection over union of the unique tokens. Both lists must be non-empty.
double Jaccard(std::span<const Token> a, std::span<const Token> b);

}  // namespace haltrag

#endif  // HALTRAG_TEXT_H_
