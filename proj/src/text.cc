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

#include "haltrag/text.h"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cctype>

#include "haltrag/error.h"

namespace haltrag {
namespace {

bool IsUnicodeSpace(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

// Decodes one UTF-8 sequence starting at text[pos]. Invalid bytes decode as
// themselves with length 1, which keeps them inside the surrounding chunk.
char32_t DecodeAt(std::string_view text, size_t pos, size_t* length) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  size_t need = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    *length = 1;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    *length = 1;
    return b0;
  }
  if (pos + need >= text.size()) {
    *length = 1;
    return b0;
  }
  for (size_t i = 1; i <= need; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) {
      *length = 1;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  *length = need + 1;
  return cp;
}

bool IsPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void EmitChunk(std::string_view chunk, TokenList* out) {
  size_t begin = 0;
  size_t end = chunk.size();
  while (begin < end && IsPunct(chunk[begin])) {
    out->emplace_back(1, chunk[begin]);
    ++begin;
  }
  size_t trail = end;
  while (trail > begin && IsPunct(chunk[trail - 1])) --trail;
  if (trail > begin) {
    std::string core(chunk.substr(begin, trail - begin));
    for (char& c : core) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out->push_back(std::move(core));
  }
  for (size_t i = trail; i < end; ++i) out->emplace_back(1, chunk[i]);
}

}  // namespace

TokenList Tokenize(std::string_view text) {
  TokenList tokens;
  size_t chunk_begin = 0;
  bool in_chunk = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t len = 1;
    const char32_t cp = DecodeAt(text, pos, &len);
    if (IsUnicodeSpace(cp)) {
      if (in_chunk) EmitChunk(text.substr(chunk_begin, pos - chunk_begin), &tokens);
      in_chunk = false;
    } else if (!in_chunk) {
      chunk_begin = pos;
      in_chunk = true;
    }
    pos += len;
  }
  if (in_chunk) EmitChunk(text.substr(chunk_begin), &tokens);
  return tokens;
}

std::vector<TokenSpan> MakeWindows(size_t num_tokens, size_t size,
                                   size_t stride) {
  if (size == 0) throw Error(ErrorKind::kArgument, "window size must be >= 1");
  if (stride != size) {
    throw Error(ErrorKind::kArgument,
                "only non-overlapping windows (stride == size) are supported");
  }
  if (num_tokens == 0) {
    throw Error(ErrorKind::kDegenerateInput, "cannot window an empty token list");
  }
  std::vector<TokenSpan> spans;
  spans.reserve((num_tokens + size - 1) / size);
  for (size_t begin = 0; begin < num_tokens; begin += stride) {
    spans.push_back({begin, std::min(size, num_tokens - begin)});
  }
  return spans;
}

std::span<const Token> Slice(const TokenList& tokens, const TokenSpan& span) {
  return std::span<const Token>(tokens).subspan(span.begin, span.length);
}

size_t LcsLength(std::span<const Token> a, std::span<const Token> b) {
  // Two-row DP over b; short inputs stay on the stack.
  constexpr size_t kInline = 64;
  std::array<uint32_t, 2 * (kInline + 1)> inline_rows{};
  std::vector<uint32_t> heap_rows;
  uint32_t* prev = inline_rows.data();
  if (b.size() > kInline) {
    heap_rows.assign(2 * (b.size() + 1), 0);
    prev = heap_rows.data();
  }
  uint32_t* cur = prev + b.size() + 1;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL ComputeRougeL(std::span<const Token> a, std::span<const Token> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "ROUGE-L needs non-empty token lists");
  }
  const auto lcs = static_cast<double>(LcsLength(a, b));
  RougeL r;
  r.precision = lcs / static_cast<double>(b.size());
  r.recall = lcs / static_cast<double>(a.size());
  const double sum = r.precision + r.recall;
  r.f_measure = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

double Jaccard(std::span<const Token> a, std::span<const Token> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "Jaccard needs non-empty token lists");
  }
  const auto unique_sorted = [](std::span<const Token> t) {
    std::vector<std::string_view> v(t.begin(), t.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto set_a = unique_sorted(a);
  const auto set_b = unique_sorted(b);
  size_t inter = 0;
  for (auto i = set_a.begin(), j = set_b.begin(); i != set_a.end() && j != set_b.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter, ++i, ++j;
    }
  }
  const size_t uni = set_a.size() + set_b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace haltrag
