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

#include "haltrag/policy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "haltrag/calibration.h"
#include "haltrag/error.h"
#include "haltrag/numfmt.h"

namespace haltrag {
namespace {

void CheckProbs(std::span<const double> probs, std::span<const int> labels) {
  if (probs.empty()) throw Error(ErrorKind::kArgument, "empty prediction set");
  if (probs.size() != labels.size()) {
    throw Error(ErrorKind::kArgument, "probs and labels differ in length");
  }
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      throw Error(ErrorKind::kArgument, "probability outside [0, 1]");
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::kArgument, "label not in {0, 1}");
    }
  }
}

void CheckBothClasses(std::span<const int> labels) {
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || static_cast<size_t>(positives) == labels.size()) {
    throw Error(ErrorKind::kDegenerateLabels, "both classes must be present");
  }
}

// Groups examples by distinct probability, descending, with per-group
// positive/negative counts.
struct ProbGroup {
  double prob;
  size_t positives;
  size_t negatives;
};

std::vector<ProbGroup> GroupDescending(std::span<const double> probs,
                                       std::span<const int> labels) {
  std::vector<size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return probs[a] > probs[b]; });
  std::vector<ProbGroup> groups;
  for (size_t i : order) {
    if (groups.empty() || groups.back().prob != probs[i]) {
      groups.push_back({probs[i], 0, 0});
    }
    (labels[i] == 1 ? groups.back().positives : groups.back().negatives) += 1;
  }
  return groups;
}

}  // namespace

double Confusion::Precision() const {
  return tp + fp == 0 ? 0.0
                      : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Confusion::Recall() const {
  return tp + fn == 0 ? 0.0
                      : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Confusion::F1() const {
  const double p = Precision(), r = Recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double Confusion::Accuracy() const {
  return total() == 0 ? 0.0
                      : static_cast<double>(tp + tn) / static_cast<double>(total());
}

Confusion ComputeConfusion(std::span<const double> probs,
                           std::span<const int> labels, double threshold) {
  CheckProbs(probs, labels);
  Confusion c;
  for (size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

std::vector<double> CandidateThresholds(std::span<const double> probs) {
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> cands{0.0, 1.0};
  for (size_t i = 1; i < sorted.size(); ++i) {
    cands.push_back(sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2.0);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

ThresholdChoice OptimizeThreshold(std::span<const double> probs,
                                  std::span<const int> labels,
                                  double precision_floor) {
  CheckProbs(probs, labels);
  CheckBothClasses(labels);
  if (!(precision_floor > 0.0 && precision_floor <= 1.0)) {
    throw Error(ErrorKind::kArgument, "precision floor must lie in (0, 1]");
  }

  // Ascending probabilities with suffix counts of positives, so the
  // confusion at any threshold is one binary search away.
  std::vector<size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return probs[a] < probs[b]; });
  std::vector<double> sorted(probs.size());
  std::vector<size_t> suffix_pos(probs.size() + 1, 0);
  for (size_t r = 0; r < order.size(); ++r) sorted[r] = probs[order[r]];
  for (size_t r = order.size(); r-- > 0;) {
    suffix_pos[r] = suffix_pos[r + 1] + (labels[order[r]] == 1 ? 1 : 0);
  }
  const size_t total_pos = suffix_pos[0];
  const size_t total_neg = probs.size() - total_pos;

  const auto cands = CandidateThresholds(probs);
  std::vector<Confusion> confusions(cands.size());
  double best_f1 = -1.0;
  double best_precision = 0.0;
  for (size_t c = 0; c < cands.size(); ++c) {
    const size_t first = static_cast<size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), cands[c]) - sorted.begin());
    Confusion& conf = confusions[c];
    conf.tp = suffix_pos[first];
    conf.fp = (sorted.size() - first) - conf.tp;
    conf.fn = total_pos - conf.tp;
    conf.tn = total_neg - conf.fp;
    best_precision = std::max(best_precision, conf.Precision());
    if (conf.Precision() >= precision_floor) best_f1 = std::max(best_f1, conf.F1());
  }
  if (best_f1 < 0.0) {
    throw Error(ErrorKind::kInfeasible,
                "no threshold reaches precision " + FormatRoundTrip(precision_floor) +
                    "; best achievable precision is " +
                    FormatRoundTrip(best_precision));
  }
  for (size_t c = cands.size(); c-- > 0;) {
    const Confusion& conf = confusions[c];
    if (conf.Precision() >= precision_floor &&
        conf.F1() >= best_f1 - kF1TieTolerance) {
      ThresholdChoice choice;
      choice.policy.threshold = cands[c];
      choice.policy.precision_floor = precision_floor;
      choice.confusion = conf;
      return choice;
    }
  }
  throw Error(ErrorKind::kInfeasible, "threshold search found no candidate");
}

std::vector<PrPoint> PrCurve(std::span<const double> probs,
                             std::span<const int> labels) {
  CheckProbs(probs, labels);
  CheckBothClasses(labels);
  const auto groups = GroupDescending(probs, labels);
  size_t total_pos = 0;
  for (const auto& g : groups) total_pos += g.positives;
  std::vector<PrPoint> points;
  size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    points.push_back({g.prob, static_cast<double>(tp) / static_cast<double>(tp + fp),
                      static_cast<double>(tp) / static_cast<double>(total_pos)});
  }
  return points;
}

RocCurve ComputeRoc(std::span<const double> probs, std::span<const int> labels) {
  CheckProbs(probs, labels);
  CheckBothClasses(labels);
  const auto groups = GroupDescending(probs, labels);
  double total_pos = 0.0, total_neg = 0.0;
  for (const auto& g : groups) {
    total_pos += static_cast<double>(g.positives);
    total_neg += static_cast<double>(g.negatives);
  }
  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double tp = 0.0, fp = 0.0;
  for (const auto& g : groups) {
    tp += static_cast<double>(g.positives);
    fp += static_cast<double>(g.negatives);
    const RocPoint& prev = roc.points.back();
    const RocPoint next{g.prob, fp / total_neg, tp / total_pos};
    roc.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    roc.points.push_back(next);
  }
  return roc;
}

SelectiveReport SelectWithAbstention(std::span<const double> probs,
                                     std::span<const int> labels,
                                     const DecisionPolicy& policy,
                                     double coverage_target) {
  CheckProbs(probs, labels);
  if (!(coverage_target > 0.0 && coverage_target <= 1.0)) {
    throw Error(ErrorKind::kArgument, "coverage target must lie in (0, 1]");
  }
  const size_t n = probs.size();
  // The epsilon keeps e.g. (1 - 0.99) * 100 from rounding up to 2.
  const double raw = (1.0 - coverage_target) * static_cast<double>(n) - 1e-9;
  const size_t abstain_count =
      std::min(n, static_cast<size_t>(std::max(0.0, std::ceil(raw))));

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(probs[a] - policy.threshold) <
           std::abs(probs[b] - policy.threshold);
  });

  SelectiveReport rep;
  rep.coverage_target = coverage_target;
  rep.abstain.assign(n, false);
  for (size_t r = 0; r < abstain_count; ++r) rep.abstain[order[r]] = true;
  rep.abstained = abstain_count;
  rep.retained = n - abstain_count;
  rep.realized_coverage = static_cast<double>(rep.retained) / static_cast<double>(n);

  for (size_t i = 0; i < n; ++i) {
    if (rep.abstain[i]) continue;
    const bool predicted = probs[i] >= policy.threshold;
    if (labels[i] == 1) {
      (predicted ? rep.confusion.tp : rep.confusion.fn) += 1;
    } else {
      (predicted ? rep.confusion.fp : rep.confusion.tn) += 1;
    }
  }
  const Confusion& c = rep.confusion;
  rep.precision_defined = c.tp + c.fp > 0;
  rep.recall_defined = c.tp + c.fn > 0;
  rep.accuracy_defined = rep.retained > 0;
  rep.precision = c.Precision();
  rep.recall = c.Recall();
  rep.f1 = c.F1();
  rep.accuracy = c.Accuracy();
  return rep;
}

std::vector<RiskCoveragePoint> RiskCoverageCurve(std::span<const double> probs,
                                                 std::span<const int> labels,
                                                 const DecisionPolicy& policy) {
  std::vector<RiskCoveragePoint> points;
  for (int pct = 100; pct >= 50; --pct) {
    const double target = pct / 100.0;
    const auto rep = SelectWithAbstention(probs, labels, policy, target);
    points.push_back({target, rep.realized_coverage, rep.precision, rep.f1,
                      rep.precision_defined});
  }
  return points;
}

EvalReport Evaluate(std::span<const double> probs, std::span<const int> labels,
                    double precision_floor,
                    std::optional<double> coverage_target) {
  EvalReport rep;
  const auto choice = OptimizeThreshold(probs, labels, precision_floor);
  rep.policy = choice.policy;
  rep.policy.coverage_target = coverage_target;
  rep.confusion = choice.confusion;
  rep.precision = rep.confusion.Precision();
  rep.recall = rep.confusion.Recall();
  rep.f1 = rep.confusion.F1();
  rep.accuracy = rep.confusion.Accuracy();
  rep.pr_curve = PrCurve(probs, labels);
  rep.roc = ComputeRoc(probs, labels);
  rep.ece = ExpectedCalibrationError(probs, labels);
  rep.risk_coverage = RiskCoverageCurve(probs, labels, rep.policy);
  if (coverage_target) {
    rep.selective = SelectWithAbstention(probs, labels, rep.policy, *coverage_target);
  }
  return rep;
}

}  // namespace haltrag
