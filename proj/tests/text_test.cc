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

#include <gtest/gtest.h>

#include <regex>

#include "haltrag/error.h"
#include "haltrag/rng.h"
#include "oracles.h"

namespace haltrag {
namespace {

TokenList Toks(std::initializer_list<const char*> words) {
  return TokenList(words.begin(), words.end());
}

TEST(Tokenize, SplitsTrailingPunctuationAndLowercases) {
  EXPECT_EQ(Tokenize("The cat sat."), Toks({"the", "cat", "sat", "."}));
}

TEST(Tokenize, EmptyAndWhitespaceOnly) {
  EXPECT_TRUE(Tokenize("").empty());
  EXPECT_TRUE(Tokenize(" \t\n ").empty());
}

TEST(Tokenize, LeadingPunctuationAndInteriorKept) {
  EXPECT_EQ(Tokenize("\"Don't\" (3.5)!"),
            Toks({"\"", "don't", "\"", "(", "3.5", ")", "!"}));
  EXPECT_EQ(Tokenize("--"), Toks({"-", "-"}));
}

TEST(Tokenize, UnicodeWhitespaceSeparates) {
  // U+00A0 no-break space and U+3000 ideographic space.
  EXPECT_EQ(Tokenize("alpha\xC2\xA0" "beta\xE3\x80\x80gamma"),
            Toks({"alpha", "beta", "gamma"}));
  // Non-ASCII letters stay inside the word.
  EXPECT_EQ(Tokenize("Caf\xC3\xA9 ok"), Toks({"caf\xC3\xA9", "ok"}));
}

TEST(Tokenize, ThousandWordDocumentNeverMerges) {
  Rng rng(11);
  const char* words[] = {"Alpha", "beta,", "(gamma)", "delta.", "x-y", "end!"};
  std::string doc;
  for (int i = 0; i < 1000; ++i) {
    if (i) doc += (i % 7 == 0) ? "\n" : " ";
    doc += words[rng.UniformInt(6)];
  }
  // Reference split: whitespace-separated chunks.
  const std::regex ws("\\S+");
  const auto chunks = std::distance(
      std::sregex_iterator(doc.begin(), doc.end(), ws), std::sregex_iterator());
  ASSERT_EQ(chunks, 1000);
  EXPECT_GE(Tokenize(doc).size(), static_cast<size_t>(chunks));
}

TEST(MakeWindows, SevenHundredTokens) {
  const auto w = MakeWindows(700);
  ASSERT_EQ(w.size(), 3u);  // ceil(700 / 320)
  EXPECT_EQ(w[0], (TokenSpan{0, 320}));
  EXPECT_EQ(w[1], (TokenSpan{320, 320}));
  EXPECT_EQ(w[2], (TokenSpan{640, 60}));
}

TEST(MakeWindows, ExactFitAndSingleToken) {
  EXPECT_EQ(MakeWindows(320), (std::vector<TokenSpan>{{0, 320}}));
  EXPECT_EQ(MakeWindows(1), (std::vector<TokenSpan>{{0, 1}}));
}

TEST(MakeWindows, Errors) {
  try {
    MakeWindows(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateInput);
  }
  EXPECT_THROW(MakeWindows(10, 5, 3), Error);
  EXPECT_THROW(MakeWindows(10, 0, 0), Error);
}

TEST(MakeWindows, PartitionProperty) {
  for (size_t n = 1; n < 1500; n += 37) {
    const auto spans = MakeWindows(n);
    size_t next = 0;
    for (const auto& s : spans) {
      EXPECT_EQ(s.begin, next);
      EXPECT_GE(s.length, 1u);
      EXPECT_LE(s.length, kWindowSize);
      next += s.length;
    }
    EXPECT_EQ(next, n);
    EXPECT_EQ(spans.size(), (n + kWindowSize - 1) / kWindowSize);
  }
}

TEST(RougeL, Examples) {
  const auto same = Toks({"a", "b", "c", "d", "e"});
  const auto r1 = ComputeRougeL(same, same);
  EXPECT_DOUBLE_EQ(r1.precision, 1.0);
  EXPECT_DOUBLE_EQ(r1.recall, 1.0);
  EXPECT_DOUBLE_EQ(r1.f_measure, 1.0);

  const auto r2 = ComputeRougeL(Toks({"a", "b"}), Toks({"c", "d"}));
  EXPECT_EQ(r2.precision, 0.0);
  EXPECT_EQ(r2.recall, 0.0);
  EXPECT_EQ(r2.f_measure, 0.0);

  const auto r3 = ComputeRougeL(Toks({"the", "cat", "sat"}), Toks({"the", "dog", "sat"}));
  EXPECT_DOUBLE_EQ(r3.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r3.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r3.f_measure, 2.0 / 3.0);

  EXPECT_THROW(ComputeRougeL(TokenList{}, same), Error);
}

TEST(Jaccard, Examples) {
  EXPECT_DOUBLE_EQ(Jaccard(Toks({"x", "y"}), Toks({"y", "x", "x"})), 1.0);
  EXPECT_DOUBLE_EQ(Jaccard(Toks({"a", "b"}), Toks({"b", "c"})), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(Jaccard(Toks({"a"}), Toks({"b"})), 0.0);
  EXPECT_THROW(Jaccard(Toks({"a"}), TokenList{}), Error);
}

TEST(Lexical, RandomListsMatchOracles) {
  Rng rng(2024);
  const char* alphabet[] = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 3000; ++trial) {
    TokenList a(1 + rng.UniformInt(12)), b(1 + rng.UniformInt(12));
    for (auto& t : a) t = alphabet[rng.UniformInt(4)];
    for (auto& t : b) t = alphabet[rng.UniformInt(4)];
    const auto lcs = static_cast<double>(oracle::LcsBySubsets(a, b));
    const auto r = ComputeRougeL(a, b);
    EXPECT_EQ(r.precision, lcs / static_cast<double>(b.size()));
    EXPECT_EQ(r.recall, lcs / static_cast<double>(a.size()));
    EXPECT_EQ(Jaccard(a, b), oracle::JaccardBySets(a, b));
    // Swapping arguments exchanges precision and recall.
    const auto s = ComputeRougeL(b, a);
    EXPECT_EQ(s.precision, r.recall);
    EXPECT_EQ(s.recall, r.precision);
    EXPECT_NEAR(s.f_measure, r.f_measure, 1e-15);
  }
}

}  // namespace
}  // namespace haltrag
