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

#ifndef HALTRAG_MODELS_H_
#define HALTRAG_MODELS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace haltrag {

enum class ClassifierKind { kLogReg, kLinearSvc };

std::string_view ClassifierName(ClassifierKind kind);
ClassifierKind ParseClassifier(std::string_view name);

// Per-column z-score. Scales below 1e-12 are floored.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd Transform(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd Transform(std::span<const double> x) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

inline constexpr double kScaleFloor = 1e-12;

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
};

// w_c = n / (2 * count_c). Throws kDegenerateLabels unless both classes occur.
ClassWeights ComputeClassWeights(std::span<const int> labels);

// Regularized training objective over standardized rows, as a function of
// params = [w; b]:
//   0.5 * |w|^2 + C * sum_i s_{y_i} * loss(ytilde_i * (w . x_i + b))
// with loss = log(1 + exp(-m)) (logreg) or max(0, 1 - m)^2 (linear_svc).
// The intercept is not regularized.
class LinearObjective {
 public:
  LinearObjective(ClassifierKind kind, Eigen::MatrixXd x, std::span<const int> y,
                  ClassWeights weights, double c);

  size_t dim() const { return static_cast<size_t>(x_.cols()); }
  double Value(const Eigen::VectorXd& params) const;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& params) const;
  // Generalized Hessian for the squared hinge.
  Eigen::MatrixXd Hessian(const Eigen::VectorXd& params) const;

 private:
  ClassifierKind kind_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd signed_y_;
  Eigen::VectorXd sample_weight_;
  double c_;
};

enum class Solver {
  // Backtracking line search along the negative gradient.
  kGradientDescent,
  // Backtracking line search along the Newton direction.
  kNewton,
};

// Relative rounding resolution of the objective. Once the expected decrease
// of a step is below it, a step is accepted if the gradient norm shrinks and
// the objective rises by no more than this amount.
inline constexpr double kObjectiveResolution = 1e-13;

struct FitOptions {
  double c = 1.0;
  uint64_t seed = 0;
  double gradient_tolerance = 1e-6;
  int max_iterations = 10000;
  Solver solver = Solver::kGradientDescent;
  bool record_trace = false;
};

struct LinearModel {
  ClassifierKind kind = ClassifierKind::kLogReg;
  std::vector<double> weights;  // in standardized space
  double bias = 0.0;
  double c = 1.0;
  Standardizer standardizer;
  uint64_t seed = 0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective value before the first and after every accepted step, when
  // requested.
  std::vector<double> objective_trace;

  size_t dim() const { return weights.size(); }
};

// Throws kInput on non-finite features or shape mismatch, kDegenerateLabels
// when a class has fewer than two rows.
LinearModel Fit(ClassifierKind kind, const Eigen::MatrixXd& x,
                std::span<const int> y, const FitOptions& options = {});

// w . standardize(x) + b. Throws kInput on dimension mismatch.
double DecisionScore(const LinearModel& model, std::span<const double> x);
std::vector<double> DecisionScores(const LinearModel& model,
                                   const Eigen::MatrixXd& x);

void WriteModel(const LinearModel& model, std::ostream& out);
// Reads what WriteModel wrote; throws kFormat otherwise.
LinearModel ReadModel(std::istream& in);

}  // namespace haltrag

#endif  // HALTRAG_MODELS_H_
