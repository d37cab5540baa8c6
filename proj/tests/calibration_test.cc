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

#include "haltrag/calibration.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "haltrag/error.h"
#include "haltrag/rng.h"
#include "oracles.h"

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

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gradient of the smoothed-target negative log-likelihood, written out
// directly.
std::pair<double, double> PlattGradient(const std::vector<double>& s,
                                        const std::vector<int>& y, double a,
                                        double b) {
  double np = 0, nn = 0;
  for (int v : y) (v ? np : nn) += 1.0;
  const double tp = (np + 1) / (np + 2), tn = 1 / (nn + 2);
  double ga = 0, gb = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double r = Sigmoid(a * s[i] + b) - (y[i] ? tp : tn);
    ga += r * s[i];
    gb += r;
  }
  return {ga, gb};
}

TEST(Platt, SeparatedScoresGivePositiveSlope) {
  const std::vector<double> s = {-3, -2, -1, 1, 2, 3};
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  const auto cal = FitPlatt(s, y);
  EXPECT_GT(cal.platt().a, 0.0);
  EXPECT_LT(cal.Apply(-3.0), 0.5);
  EXPECT_GT(cal.Apply(3.0), 0.5);
  // Smoothed targets keep the fit finite.
  EXPECT_TRUE(std::isfinite(cal.platt().a));
}

TEST(Platt, StationaryPointOnRandomData) {
  std::vector<double> slopes;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<double> s(300);
    std::vector<int> y(300);
    for (size_t i = 0; i < s.size(); ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : rng.Bernoulli(0.4);
      s[i] = 1.5 * (y[i] ? 1.0 : -1.0) + rng.Normal();
    }
    const auto p = FitPlatt(s, y).platt();
    const auto [ga, gb] = PlattGradient(s, y, p.a, p.b);
    EXPECT_LE(std::hypot(ga, gb), 1e-8) << "seed " << seed;
    slopes.push_back(p.a);
  }
  // Class-conditional normals with means +-1.5 and unit variance have
  // log-odds slope 3.
  std::nth_element(slopes.begin(), slopes.begin() + 10, slopes.end());
  EXPECT_NEAR(slopes[10], 3.0, 0.6);
}

TEST(Platt, NegatingScoresNegatesSlope) {
  Rng rng(12);
  std::vector<double> s(100), neg(100);
  std::vector<int> y(100);
  for (size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<int>(i % 2);
    s[i] = (y[i] ? 0.8 : -0.5) + rng.Normal();
    neg[i] = -s[i];
  }
  const auto p = FitPlatt(s, y).platt();
  const auto q = FitPlatt(neg, y).platt();
  EXPECT_NEAR(p.a, -q.a, 1e-8);
  EXPECT_NEAR(p.b, q.b, 1e-8);
}

TEST(Platt, Errors) {
  const std::vector<double> s = {1, 2, 3};
  const std::vector<int> one = {1, 1, 1};
  EXPECT_EQ(KindOf([&] { FitPlatt(s, one); }), ErrorKind::kDegenerateLabels);
  const std::vector<int> short_labels = {1, 0};
  EXPECT_THROW(FitPlatt(s, short_labels), Error);
}

TEST(Isotonic, Examples) {
  const std::vector<double> s = {1, 2, 3};
  const std::vector<int> y1 = {0, 1, 1};
  EXPECT_EQ(FitIsotonic(s, y1).Apply(s), (std::vector<double>{0, 1, 1}));
  const std::vector<int> y2 = {0, 1, 0};
  EXPECT_EQ(FitIsotonic(s, y2).Apply(s), (std::vector<double>{0, 0.5, 0.5}));
  const std::vector<int> y3 = {1, 0, 0, 1};
  const std::vector<double> s4 = {1, 2, 3, 4};
  const auto fit = FitIsotonic(s4, y3).Apply(s4);
  EXPECT_NEAR(fit[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit[2], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(fit[3], 1.0);
}

TEST(Isotonic, TiedScoresArePooled) {
  const std::vector<double> s = {2, 1, 2, 2};
  const std::vector<int> y = {1, 0, 0, 1};
  const auto cal = FitIsotonic(s, y);
  EXPECT_EQ(cal.isotonic().knot_scores, (std::vector<double>{1, 2}));
  EXPECT_NEAR(cal.Apply(2.0), 2.0 / 3.0, 1e-15);
}

TEST(Isotonic, ApplyInterpolatesAndClamps) {
  IsotonicParams p;
  p.knot_scores = {0.0, 1.0, 3.0};
  p.knot_values = {0.1, 0.5, 0.9};
  const Calibrator cal(p);
  EXPECT_DOUBLE_EQ(cal.Apply(-5.0), 0.1);
  EXPECT_DOUBLE_EQ(cal.Apply(0.5), 0.3);
  EXPECT_DOUBLE_EQ(cal.Apply(2.0), 0.7);
  EXPECT_DOUBLE_EQ(cal.Apply(9.0), 0.9);
}

TEST(Isotonic, ExhaustiveBinarySequencesMatchPartitionOracle) {
  for (size_t n = 2; n <= 6; ++n) {
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      std::vector<double> s(n), y(n);
      std::vector<int> labels(n);
      for (size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(i);
        labels[i] = (bits >> i) & 1u;
        y[i] = labels[i];
      }
      const auto expect = oracle::IsotonicByPartitions(y);
      std::vector<double> got;
      if (bits == 0 || bits == (1u << n) - 1) {
        got = PoolAdjacentViolators(y, std::vector<double>(n, 1.0));
      } else {
        got = FitIsotonic(s, labels).Apply(s);
      }
      for (size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(got[i], expect[i], 1e-6) << "n=" << n << " bits=" << bits;
      }
    }
  }
}

TEST(Isotonic, WeightedPavaMatchesMinMaxFormula) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 1 + rng.UniformInt(50);
    std::vector<double> y(n), w(n);
    for (size_t i = 0; i < n; ++i) {
      y[i] = rng.Bernoulli(0.3) ? rng.Uniform() : static_cast<double>(rng.UniformInt(2));
      w[i] = rng.Uniform(0.1, 3.0);
    }
    const auto got = PoolAdjacentViolators(y, w);
    const auto expect = oracle::IsotonicMinMax(y, w);
    for (size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], expect[i], 1e-9);
  }
}

TEST(Isotonic, RandomScoresWithTiesMatchOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 2 + rng.UniformInt(49);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.UniformInt(n)) / 4.0;
      y[i] = i < 2 ? static_cast<int>(i) : rng.Bernoulli(0.5);
    }
    // Oracle: group by score, weight = group size, target = group mean.
    std::map<double, std::pair<double, double>> groups;
    for (size_t i = 0; i < n; ++i) {
      groups[s[i]].first += 1.0;
      groups[s[i]].second += y[i];
    }
    std::vector<double> gy, gw, gs;
    for (const auto& [score, g] : groups) {
      gs.push_back(score);
      gw.push_back(g.first);
      gy.push_back(g.second / g.first);
    }
    const auto fit = oracle::IsotonicMinMax(gy, gw);
    const auto cal = FitIsotonic(s, y);
    double total = 0.0, labels = 0.0;
    for (size_t g = 0; g < gs.size(); ++g) {
      EXPECT_NEAR(cal.Apply(gs[g]), fit[g], 1e-6);
      total += gw[g] * cal.Apply(gs[g]);
      labels += gw[g] * gy[g];
    }
    // PAVA preserves the label mean.
    EXPECT_NEAR(total, labels, 1e-9);
  }
}

TEST(Calibrators, MonotoneOnRandomPairs) {
  Rng rng(5);
  std::vector<double> s(400);
  std::vector<int> y(400);
  for (size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<int>(i % 2);
    s[i] = (y[i] ? 1.0 : -1.0) + 1.5 * rng.Normal();
  }
  for (auto method : {CalibrationMethod::kPlatt, CalibrationMethod::kIsotonic}) {
    const auto cal = FitCalibrator(method, s, y);
    for (int i = 0; i < 10000; ++i) {
      double u = rng.Uniform(-6, 6), v = rng.Uniform(-6, 6);
      if (u > v) std::swap(u, v);
      EXPECT_LE(cal.Apply(u), cal.Apply(v));
    }
  }
}

TEST(Calibrators, SerializationRoundTrip) {
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8, 0.2, 0.9};
  const std::vector<int> y = {0, 1, 0, 1, 0, 1};
  for (auto method : {CalibrationMethod::kPlatt, CalibrationMethod::kIsotonic}) {
    const auto cal = FitCalibrator(method, s, y);
    std::stringstream buf;
    WriteCalibrator(cal, buf);
    const auto back = ReadCalibrator(buf);
    EXPECT_EQ(back.method(), method);
    EXPECT_EQ(back.Apply(s), cal.Apply(s));
  }
}

TEST(Ece, Examples) {
  const std::vector<double> half = {0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y = {0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(ExpectedCalibrationError(half, y), 0.0);

  // 1.0 falls into the last bin.
  const std::vector<double> ones = {1.0, 1.0};
  const std::vector<int> mixed = {1, 0};
  EXPECT_DOUBLE_EQ(ExpectedCalibrationError(ones, mixed), 0.5);

  // Two bins: [0.0, 0.1) with conf 0.05, acc 0; [0.9, 1.0] with conf 0.95, acc 1.
  const std::vector<double> p = {0.05, 0.95};
  const std::vector<int> l = {0, 1};
  EXPECT_NEAR(ExpectedCalibrationError(p, l), 0.05, 1e-15);

  EXPECT_EQ(KindOf([] { ExpectedCalibrationError({}, {}); }), ErrorKind::kArgument);
}

TEST(Ece, BernoulliStreamIsCalibrated) {
  Rng rng(123);
  std::vector<double> p(10000);
  std::vector<int> y(10000);
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = rng.Uniform();
    y[i] = rng.Bernoulli(p[i]);
  }
  EXPECT_LE(ExpectedCalibrationError(p, y), 0.02);
}

TEST(Ece, ReliabilityBinsCoverInput) {
  Rng rng(4);
  std::vector<double> p(500);
  std::vector<int> y(500);
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = rng.Uniform();
    y[i] = rng.Bernoulli(0.5);
  }
  const auto bins = ReliabilityDiagram(p, y);
  ASSERT_EQ(bins.size(), 10u);
  size_t total = 0;
  double ece = 0.0;
  for (const auto& b : bins) {
    total += b.count;
    ece += static_cast<double>(b.count) / 500.0 *
           std::abs(b.fraction_positive - b.mean_confidence);
  }
  EXPECT_EQ(total, 500u);
  EXPECT_NEAR(ece, ExpectedCalibrationError(p, y), 1e-12);
}

}  // namespace
}  // namespace haltrag
