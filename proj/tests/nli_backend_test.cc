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

#include <gtest/gtest.h>

#include <sstream>

#include "haltrag/error.h"
#include "haltrag/rng.h"
#include "haltrag/text.h"

namespace haltrag {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kArgument;
}

ScoreTable Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseScoreTable(in, "mem");
}

TEST(NliDistribution, Validity) {
  EXPECT_TRUE((NliDistribution{0.2, 0.3, 0.5}).IsValid());
  EXPECT_FALSE((NliDistribution{0.2, 0.3, 0.6}).IsValid());
  EXPECT_FALSE((NliDistribution{-0.1, 0.6, 0.5}).IsValid());
}

TEST(LookupBackend, HitAndMiss) {
  ScoreTable t;
  t.backend = {"m", "1"};
  t.scores[{"7_pos", 0, 0}] = {0.1, 0.2, 0.7};
  LookupBackend b(t);
  TokenList words = {"x"};
  ScoreRequest hit{{"7_pos", 0, 0}, words, words};
  EXPECT_EQ(b.Score(hit), (NliDistribution{0.1, 0.2, 0.7}));
  ScoreRequest miss{{"7_pos", 1, 0}, words, words};
  EXPECT_EQ(KindOf([&] { b.Score(miss); }), ErrorKind::kMissingScore);
}

TEST(SyntheticBackend, IdenticalTextIsEntailed) {
  SyntheticBackend b(3);
  const TokenList words = Tokenize("the quick brown fox jumps over the lazy dog");
  const auto d = b.Score({{"x", 0, 0}, words, words});
  EXPECT_GE(d.entail, 0.8);
  EXPECT_TRUE(d.IsValid(1e-12));
}

TEST(SyntheticBackend, DeterministicAndAlwaysValid) {
  Rng rng(5);
  const char* vocab[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  SyntheticBackend b1(42), b2(42);
  for (int trial = 0; trial < 2000; ++trial) {
    TokenList p(1 + rng.UniformInt(30)), h(1 + rng.UniformInt(10));
    for (auto& t : p) t = vocab[rng.UniformInt(8)];
    for (auto& t : h) t = vocab[rng.UniformInt(8)];
    const ScoreRequest req{{"id", 0, 0}, p, h};
    const auto d = b1.Score(req);
    EXPECT_TRUE(d.IsValid(1e-12));
    EXPECT_EQ(d, b2.Score(req));
  }
}

TEST(ScoreTable, LoadsRecords) {
  const auto t = Parse(
      "#halt-nli-v1 deberta 2\n"
      "1_pos\t0\t0\t0.1\t0.2\t0.7\n"
      "1_pos\t0\t1\t0.3\t0.3\t0.4\n"
      "1_neg\t1\t0\t0.5\t0.25\t0.25\n");
  EXPECT_EQ(t.backend, (BackendId{"deberta", "2"}));
  ASSERT_EQ(t.scores.size(), 3u);
  EXPECT_EQ(t.renormalized, 0u);
  EXPECT_EQ(t.scores.at({"1_neg", 1, 0}).entail, 0.5);
}

TEST(ScoreTable, RenormalizesWithinTolerance) {
  const auto t = Parse("#halt-nli-v1 m 1\nx\t0\t0\t0.5\t0.25\t0.25005\n");
  EXPECT_EQ(t.renormalized, 1u);
  EXPECT_NEAR(t.scores.at({"x", 0, 0}).Sum(), 1.0, 1e-9);
}

TEST(ScoreTable, Rejections) {
  EXPECT_EQ(KindOf([] { Parse("#halt-nli-v1 m 1\nx\t0\t0\t0.3\t0.3\t0.3\n"); }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Parse("#halt-nli-v1 m 1\nx\t0\t0\t-0.1\t0.6\t0.5\n"); }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Parse("#halt-nli-v1 m 1\nx\t0\t0.2\t0.3\t0.5\n"); }),
            ErrorKind::kFormat);
  EXPECT_EQ(KindOf([] { Parse("#halt-nli-v1 m 1\nx\tzero\t0\t0.2\t0.3\t0.5\n"); }),
            ErrorKind::kFormat);
  EXPECT_EQ(KindOf([] {
              Parse("#halt-nli-v1 m 1\nx\t0\t0\t0.2\t0.3\t0.5\nx\t0\t0\t0.2\t0.3\t0.5\n");
            }),
            ErrorKind::kFormat);
  EXPECT_EQ(KindOf([] { Parse("nope\n"); }), ErrorKind::kFormat);
}

TEST(ScoreTable, MalformedLineNamesLine) {
  try {
    Parse("#halt-nli-v1 m 1\nx\t0\t0\t0.2\t0.3\t0.5\nbroken\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}

TEST(ScoreTable, WriteReadRoundTrip) {
  Rng rng(9);
  ScoreTable t;
  t.backend = {"m", "1"};
  for (int i = 0; i < 200; ++i) {
    double e = rng.Uniform(), n = rng.Uniform(), c = rng.Uniform();
    const double s = e + n + c;
    t.scores[{std::to_string(i) + "_pos", rng.UniformInt(3), rng.UniformInt(2)}] = {
        e / s, n / s, c / s};
  }
  std::stringstream buf;
  WriteScoreTable(t, buf);
  const auto back = ParseScoreTable(buf, "buf");
  EXPECT_EQ(back.backend, t.backend);
  ASSERT_EQ(back.scores.size(), t.scores.size());
  for (const auto& [k, d] : t.scores) {
    const auto& r = back.scores.at(k);
    EXPECT_NEAR(r.entail, d.entail, 1e-15);
    EXPECT_NEAR(r.neutral, d.neutral, 1e-15);
    EXPECT_NEAR(r.contradict, d.contradict, 1e-15);
  }
}

}  // namespace
}  // namespace haltrag
