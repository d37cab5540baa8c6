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

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"

namespace haltrag {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z))
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void CheckInputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kArgument, "scores and labels differ in length");
  }
  size_t positives = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::kInput, "non-finite score");
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::kInput, "label not in {0, 1}");
    }
    positives += labels[i] == 1;
  }
  if (positives == 0 || positives == labels.size()) {
    throw Error(ErrorKind::kDegenerateLabels,
                "calibration needs both classes present");
  }
}

struct PlattState {
  double value = 0.0;
  double ga = 0.0, gb = 0.0;
  double haa = 0.0, hab = 0.0, hbb = 0.0;
};

PlattState EvaluatePlatt(std::span<const double> s, std::span<const double> t,
                         double a, double b) {
  PlattState st;
  for (size_t i = 0; i < s.size(); ++i) {
    const double z = a * s[i] + b;
    st.value += Softplus(z) - t[i] * z;
    const double p = Sigmoid(z);
    const double r = p - t[i];
    const double w = p * (1.0 - p);
    st.ga += r * s[i];
    st.gb += r;
    st.haa += w * s[i] * s[i];
    st.hab += w * s[i];
    st.hbb += w;
  }
  return st;
}

std::vector<double> ReadNumbers(std::istringstream& in, size_t n) {
  std::vector<double> v(n);
  std::string tok;
  for (auto& x : v) {
    if (!(in >> tok)) throw Error(ErrorKind::kFormat, "calibrator record too short");
    const auto d = ParseDouble(tok);
    if (!d) throw Error(ErrorKind::kFormat, "bad number '" + tok + "'");
    x = *d;
  }
  return v;
}

std::istringstream KeyedLine(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kFormat, "missing calibrator line '" + std::string(key) + "'");
  }
  std::istringstream ss(line);
  std::string got;
  ss >> got;
  if (got != key) {
    throw Error(ErrorKind::kFormat, "expected '" + std::string(key) + "', found '" +
                                        got + "'");
  }
  return ss;
}

}  // namespace

std::string_view CalibrationName(CalibrationMethod method) {
  return method == CalibrationMethod::kPlatt ? "platt" : "isotonic";
}

CalibrationMethod ParseCalibration(std::string_view name) {
  if (name == "platt") return CalibrationMethod::kPlatt;
  if (name == "isotonic") return CalibrationMethod::kIsotonic;
  throw Error(ErrorKind::kConfiguration,
              "unknown calibration method '" + std::string(name) + "'");
}

double Calibrator::Apply(double score) const {
  if (const auto* p = std::get_if<PlattParams>(&params_)) {
    return Sigmoid(p->a * score + p->b);
  }
  const auto& iso = std::get<IsotonicParams>(params_);
  const auto& xs = iso.knot_scores;
  const auto& ys = iso.knot_values;
  if (xs.empty()) return 0.5;
  if (!(score > xs.front())) return ys.front();
  if (!(score < xs.back())) return ys.back();
  const size_t hi = static_cast<size_t>(
      std::upper_bound(xs.begin(), xs.end(), score) - xs.begin());
  const size_t lo = hi - 1;
  const double frac = (score - xs[lo]) / (xs[hi] - xs[lo]);
  // Convex combination keeps the result between the two knot values.
  return std::clamp(ys[lo] + frac * (ys[hi] - ys[lo]), ys[lo], ys[hi]);
}

std::vector<double> Calibrator::Apply(std::span<const double> scores) const {
  std::vector<double> out(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) out[i] = Apply(scores[i]);
  return out;
}

Calibrator FitPlatt(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  double n_pos = 0.0, n_neg = 0.0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1.0;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);
  std::vector<double> targets(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    targets[i] = labels[i] == 1 ? t_pos : t_neg;
  }

  PlattParams p;
  p.a = 0.0;
  p.b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  PlattState st = EvaluatePlatt(scores, targets, p.a, p.b);
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 200;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const double gnorm = std::hypot(st.ga, st.gb);
    if (gnorm <= kTolerance) break;
    const double haa = st.haa + 1e-12, hbb = st.hbb + 1e-12, hab = st.hab;
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * st.ga - hab * st.gb) / det;
    double db = -(-hab * st.ga + haa * st.gb) / det;
    if (!std::isfinite(da) || !std::isfinite(db) || da * st.ga + db * st.gb >= 0.0) {
      da = -st.ga;
      db = -st.gb;
    }
    const double slope = da * st.ga + db * st.gb;
    bool accepted = false;
    for (double step = 1.0; step >= 1e-12; step *= 0.5) {
      const PlattState next =
          EvaluatePlatt(scores, targets, p.a + step * da, p.b + step * db);
      // Near the optimum the objective stops resolving the decrease in
      // floating point; a shrinking gradient is accepted instead.
      const bool armijo = next.value <= st.value + 1e-4 * step * slope;
      const bool gradient_shrinks =
          next.value <= st.value + 1e-12 * std::abs(st.value) &&
          std::hypot(next.ga, next.gb) < gnorm;
      if (armijo || gradient_shrinks) {
        p.a += step * da;
        p.b += step * db;
        st = next;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  p.gradient_norm = std::hypot(st.ga, st.gb);
  p.iterations = iter;
  return Calibrator(p);
}

std::vector<double> PoolAdjacentViolators(std::span<const double> targets,
                                          std::span<const double> weights) {
  struct Block {
    double sum;     // weighted sum of targets
    double weight;
    size_t count;
    double mean() const { return sum / weight; }
  };
  std::vector<Block> stack;
  stack.reserve(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    stack.push_back({targets[i] * weights[i], weights[i], 1});
    while (stack.size() > 1 &&
           stack[stack.size() - 2].mean() > stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().sum += top.sum;
      stack.back().weight += top.weight;
      stack.back().count += top.count;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(targets.size());
  for (const auto& b : stack) fitted.insert(fitted.end(), b.count, b.mean());
  return fitted;
}

Calibrator FitIsotonic(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return scores[i] < scores[j]; });

  IsotonicParams iso;
  std::vector<double> targets, weights;
  for (size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    double positives = 0.0, count = 0.0;
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      positives += labels[order[k]];
      count += 1.0;
    }
    iso.knot_scores.push_back(s);
    targets.push_back(positives / count);
    weights.push_back(count);
  }
  iso.knot_values = PoolAdjacentViolators(targets, weights);
  return Calibrator(std::move(iso));
}

Calibrator FitCalibrator(CalibrationMethod method, std::span<const double> scores,
                         std::span<const int> labels) {
  return method == CalibrationMethod::kPlatt ? FitPlatt(scores, labels)
                                             : FitIsotonic(scores, labels);
}

std::vector<ReliabilityBin> ReliabilityDiagram(std::span<const double> probs,
                                               std::span<const int> labels,
                                               int bins) {
  if (probs.empty()) throw Error(ErrorKind::kArgument, "ECE of an empty sample");
  if (probs.size() != labels.size()) {
    throw Error(ErrorKind::kArgument, "probs and labels differ in length");
  }
  if (bins < 1) throw Error(ErrorKind::kArgument, "bin count must be >= 1");
  std::vector<ReliabilityBin> out(bins);
  std::vector<double> conf_sum(bins, 0.0), pos_sum(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    out[b].lower = static_cast<double>(b) / bins;
    out[b].upper = static_cast<double>(b + 1) / bins;
  }
  for (size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::kArgument, "probability outside [0, 1]");
    }
    const int b = std::min(static_cast<int>(p * bins), bins - 1);
    ++out[b].count;
    conf_sum[b] += p;
    pos_sum[b] += labels[i] == 1 ? 1.0 : 0.0;
  }
  for (int b = 0; b < bins; ++b) {
    if (out[b].count == 0) continue;
    const auto c = static_cast<double>(out[b].count);
    out[b].mean_confidence = conf_sum[b] / c;
    out[b].fraction_positive = pos_sum[b] / c;
  }
  return out;
}

double ExpectedCalibrationError(std::span<const double> probs,
                                std::span<const int> labels, int bins) {
  const auto diagram = ReliabilityDiagram(probs, labels, bins);
  const auto n = static_cast<double>(probs.size());
  double ece = 0.0;
  for (const auto& b : diagram) {
    if (b.count == 0) continue;
    ece += static_cast<double>(b.count) / n *
           std::abs(b.fraction_positive - b.mean_confidence);
  }
  return ece;
}

void WriteCalibrator(const Calibrator& cal, std::ostream& out) {
  if (cal.method() == CalibrationMethod::kPlatt) {
    const auto& p = cal.platt();
    out << "calibrator platt\n";
    out << "platt " << FormatRoundTrip(p.a) << ' ' << FormatRoundTrip(p.b) << '\n';
    return;
  }
  const auto& iso = cal.isotonic();
  out << "calibrator isotonic\n";
  out << "knots " << iso.knot_scores.size() << '\n';
  out << "knot_scores";
  for (double x : iso.knot_scores) out << ' ' << FormatRoundTrip(x);
  out << "\nknot_values";
  for (double y : iso.knot_values) out << ' ' << FormatRoundTrip(y);
  out << '\n';
}

Calibrator ReadCalibrator(std::istream& in) {
  auto head = KeyedLine(in, "calibrator");
  std::string variant;
  head >> variant;
  if (variant == "platt") {
    auto ss = KeyedLine(in, "platt");
    const auto v = ReadNumbers(ss, 2);
    PlattParams p;
    p.a = v[0];
    p.b = v[1];
    return Calibrator(p);
  }
  if (variant != "isotonic") {
    throw Error(ErrorKind::kFormat, "unknown calibrator variant '" + variant + "'");
  }
  size_t n = 0;
  {
    auto ss = KeyedLine(in, "knots");
    if (!(ss >> n)) throw Error(ErrorKind::kFormat, "bad knot count");
  }
  IsotonicParams iso;
  {
    auto ss = KeyedLine(in, "knot_scores");
    iso.knot_scores = ReadNumbers(ss, n);
  }
  {
    auto ss = KeyedLine(in, "knot_values");
    iso.knot_values = ReadNumbers(ss, n);
  }
  return Calibrator(std::move(iso));
}

}  // namespace haltrag
