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

#ifndef HALTRAG_POLICY_H_
#define HALTRAG_POLICY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace haltrag {

struct Confusion {
  size_t tp = 0;
  size_t fp = 0;
  size_t tn = 0;
  size_t fn = 0;

  size_t total() const { return tp + fp + tn + fn; }
  // 0 when nothing is predicted positive.
  double Precision() const;
  // 0 when there are no positives.
  double Recall() const;
  double F1() const;
  double Accuracy() const;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Predicts positive iff prob >= threshold. Throws kArgument on empty input or
// a probability outside [0, 1].
Confusion ComputeConfusion(std::span<const double> probs,
                           std::span<const int> labels, double threshold);

inline constexpr double kDefaultPrecisionFloor = 0.70;
// F1 values within this distance of the best are ties, resolved toward the
// larger threshold.
inline constexpr double kF1TieTolerance = 1e-12;

struct DecisionPolicy {
  double threshold = 0.5;
  double precision_floor = kDefaultPrecisionFloor;
  std::optional<double> coverage_target;
};

struct ThresholdChoice {
  DecisionPolicy policy;
  Confusion confusion;
};

// Candidate thresholds: 0, 1 and midpoints of consecutive distinct sorted
// probabilities.
std::vector<double> CandidateThresholds(std::span<const double> probs);

// argmax F1 over the candidates subject to precision >= floor. Throws
// kInfeasible (reporting the best achievable precision) when no candidate
// meets the floor, kDegenerateLabels unless both classes are present.
ThresholdChoice OptimizeThreshold(std::span<const double> probs,
                                  std::span<const int> labels,
                                  double precision_floor = kDefaultPrecisionFloor);

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// One point per distinct probability, thresholds descending.
std::vector<PrPoint> PrCurve(std::span<const double> probs,
                             std::span<const int> labels);

struct RocCurve {
  // Starts at (0, 0) with threshold +inf, then one point per distinct
  // probability in descending order.
  std::vector<RocPoint> points;
  double auc = 0.0;  // trapezoidal
};

RocCurve ComputeRoc(std::span<const double> probs, std::span<const int> labels);

struct SelectiveReport {
  double coverage_target = 1.0;
  double realized_coverage = 1.0;
  size_t retained = 0;
  size_t abstained = 0;
  Confusion confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  // Undefined when the retained set has no predicted positives, no actual
  // positives, or is empty.
  bool precision_defined = false;
  bool recall_defined = false;
  bool accuracy_defined = false;
  std::vector<bool> abstain;  // per example
};

// Abstains on the ceil((1 - coverage) * n) examples closest to the threshold
// (ties by index) and recomputes metrics on the rest. Throws kArgument
// unless coverage is in (0, 1].
SelectiveReport SelectWithAbstention(std::span<const double> probs,
                                     std::span<const int> labels,
                                     const DecisionPolicy& policy,
                                     double coverage_target);

struct RiskCoveragePoint {
  double coverage_target;
  double realized_coverage;
  double precision;
  double f1;
  bool precision_defined;
};

// Coverage targets 1.00, 0.99, ..., 0.50.
std::vector<RiskCoveragePoint> RiskCoverageCurve(std::span<const double> probs,
                                                 std::span<const int> labels,
                                                 const DecisionPolicy& policy);

struct EvalReport {
  DecisionPolicy policy;
  Confusion confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::vector<PrPoint> pr_curve;
  RocCurve roc;
  double ece = 0.0;
  std::vector<RiskCoveragePoint> risk_coverage;
  std::optional<SelectiveReport> selective;
};

// Optimizes the threshold and assembles every metric and curve.
EvalReport Evaluate(std::span<const double> probs, std::span<const int> labels,
                    double precision_floor,
                    std::optional<double> coverage_target);

}  // namespace haltrag

#endif  // HALTRAG_POLICY_H_
