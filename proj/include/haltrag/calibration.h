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

#ifndef HALTRAG_CALIBRATION_H_
#define HALTRAG_CALIBRATION_H_

#include <iosfwd>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace haltrag {

enum class CalibrationMethod { kPlatt, kIsotonic };

std::string_view CalibrationName(CalibrationMethod method);
CalibrationMethod ParseCalibration(std::string_view name);

// probability = sigmoid(a * score + b)
struct PlattParams {
  double a = 1.0;
  double b = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Piecewise-linear monotone map through the knots, constant outside them.
struct IsotonicParams {
  std::vector<double> knot_scores;  // strictly ascending
  std::vector<double> knot_values;  // nondecreasing, in [0, 1]
};

class Calibrator {
 public:
  Calibrator() = default;
  explicit Calibrator(PlattParams p) : params_(p) {}
  explicit Calibrator(IsotonicParams p) : params_(std::move(p)) {}

  CalibrationMethod method() const {
    return std::holds_alternative<PlattParams>(params_)
               ? CalibrationMethod::kPlatt
               : CalibrationMethod::kIsotonic;
  }
  const PlattParams& platt() const { return std::get<PlattParams>(params_); }
  const IsotonicParams& isotonic() const {
    return std::get<IsotonicParams>(params_);
  }

  double Apply(double score) const;
  std::vector<double> Apply(std::span<const double> scores) const;

 private:
  std::variant<PlattParams, IsotonicParams> params_;
};

// Maximum likelihood with smoothed targets t+ = (N+ + 1)/(N+ + 2),
// t- = 1/(N- + 2); Newton with backtracking, stopping at gradient norm
// <= 1e-10 or 200 iterations.
Calibrator FitPlatt(std::span<const double> scores, std::span<const int> labels);

// Pool-adjacent-violators on labels ordered by score. Equal scores are pooled
// first so each distinct score becomes one knot.
Calibrator FitIsotonic(std::span<const double> scores, std::span<const int> labels);

Calibrator FitCalibrator(CalibrationMethod method, std::span<const double> scores,
                         std::span<const int> labels);

// Weighted PAVA on an already ordered sequence. Returns one fitted value per
// input element.
std::vector<double> PoolAdjacentViolators(std::span<const double> targets,
                                          std::span<const double> weights);

inline constexpr int kDefaultEceBins = 10;

// Equal-width bins over [0, 1], last bin right-closed; bin-weighted mean of
// |fraction positive - mean confidence|.
double ExpectedCalibrationError(std::span<const double> probs,
                                std::span<const int> labels,
                                int bins = kDefaultEceBins);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  size_t count = 0;
  double mean_confidence = 0.0;
  double fraction_positive = 0.0;
};

std::vector<ReliabilityBin> ReliabilityDiagram(std::span<const double> probs,
                                               std::span<const int> labels,
                                               int bins = kDefaultEceBins);

void WriteCalibrator(const Calibrator& cal, std::ostream& out);
Calibrator ReadCalibrator(std::istream& in);

}  // namespace haltrag

#endif  // HALTRAG_CALIBRATION_H_
