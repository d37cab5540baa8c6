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

#include "haltrag/models.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "haltrag/error.h"
#include "haltrag/numfmt.h"

namespace haltrag {
namespace {

// log(1 + exp(-m)) without overflow.
double LogisticLoss(double m) {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// d/dm log(1 + exp(-m)) = -sigmoid(-m)
double LogisticLossDerivative(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(m));
}

double LogisticLossCurvature(double m) {
  const double e = std::exp(-std::abs(m));
  return e / ((1.0 + e) * (1.0 + e));
}

std::vector<double> ReadVector(std::istringstream& in, size_t n) {
  std::vector<double> v(n);
  std::string tok;
  for (auto& x : v) {
    if (!(in >> tok)) throw Error(ErrorKind::kFormat, "model vector too short");
    auto d = ParseDouble(tok);
    if (!d) throw Error(ErrorKind::kFormat, "bad number '" + tok + "'");
    x = *d;
  }
  return v;
}

std::istringstream ExpectLine(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kFormat, "model record ends before '" +
                                        std::string(key) + "'");
  }
  std::istringstream ss(line);
  std::string got;
  ss >> got;
  if (got != key) {
    throw Error(ErrorKind::kFormat, "expected model key '" + std::string(key) +
                                        "', found '" + got + "'");
  }
  return ss;
}

void WriteVector(std::ostream& out, std::string_view key,
                 const std::vector<double>& v) {
  out << key;
  for (double x : v) out << ' ' << FormatRoundTrip(x);
  out << '\n';
}

}  // namespace

std::string_view ClassifierName(ClassifierKind kind) {
  return kind == ClassifierKind::kLogReg ? "logreg" : "linear_svc";
}

ClassifierKind ParseClassifier(std::string_view name) {
  if (name == "logreg") return ClassifierKind::kLogReg;
  if (name == "linear_svc") return ClassifierKind::kLinearSvc;
  throw Error(ErrorKind::kConfiguration,
              "unknown classifier '" + std::string(name) + "'");
}

Standardizer Standardizer::Fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean.resize(x.cols());
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mu = x.col(j).sum() / n;
    const double var = (x.col(j).array() - mu).square().sum() / n;
    s.mean[j] = mu;
    s.scale[j] = std::max(std::sqrt(var), kScaleFloor);
  }
  return s;
}

Eigen::MatrixXd Standardizer::Transform(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - mean[j]) / scale[j];
  }
  return out;
}

Eigen::VectorXd Standardizer::Transform(std::span<const double> x) const {
  Eigen::VectorXd out(x.size());
  for (size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

ClassWeights ComputeClassWeights(std::span<const int> labels) {
  size_t positives = 0;
  for (int y : labels) positives += y == 1;
  const size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::kDegenerateLabels,
                "class weights need both classes present");
  }
  const auto n = static_cast<double>(labels.size());
  return {n / (2.0 * static_cast<double>(negatives)),
          n / (2.0 * static_cast<double>(positives))};
}

LinearObjective::LinearObjective(ClassifierKind kind, Eigen::MatrixXd x,
                                 std::span<const int> y, ClassWeights weights,
                                 double c)
    : kind_(kind), x_(std::move(x)), signed_y_(y.size()),
      sample_weight_(y.size()), c_(c) {
  for (size_t i = 0; i < y.size(); ++i) {
    signed_y_[i] = y[i] == 1 ? 1.0 : -1.0;
    sample_weight_[i] = y[i] == 1 ? weights.positive : weights.negative;
  }
}

double LinearObjective::Value(const Eigen::VectorXd& params) const {
  const auto d = x_.cols();
  const Eigen::VectorXd w = params.head(d);
  const Eigen::VectorXd margins = signed_y_.cwiseProduct(
      x_ * w + Eigen::VectorXd::Constant(x_.rows(), params[d]));
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double m = margins[i];
    double l;
    if (kind_ == ClassifierKind::kLogReg) {
      l = LogisticLoss(m);
    } else {
      const double h = std::max(0.0, 1.0 - m);
      l = h * h;
    }
    loss += sample_weight_[i] * l;
  }
  return 0.5 * w.squaredNorm() + c_ * loss;
}

Eigen::VectorXd LinearObjective::Gradient(const Eigen::VectorXd& params) const {
  const auto d = x_.cols();
  const Eigen::VectorXd w = params.head(d);
  const Eigen::VectorXd margins = signed_y_.cwiseProduct(
      x_ * w + Eigen::VectorXd::Constant(x_.rows(), params[d]));
  // coef_i = C * s_i * loss'(m_i) * ytilde_i
  Eigen::VectorXd coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double m = margins[i];
    const double dl = kind_ == ClassifierKind::kLogReg
                          ? LogisticLossDerivative(m)
                          : -2.0 * std::max(0.0, 1.0 - m);
    coef[i] = c_ * sample_weight_[i] * dl * signed_y_[i];
  }
  Eigen::VectorXd g(d + 1);
  g.head(d) = w + x_.transpose() * coef;
  g[d] = coef.sum();
  return g;
}

Eigen::MatrixXd LinearObjective::Hessian(const Eigen::VectorXd& params) const {
  const auto d = x_.cols();
  const Eigen::VectorXd w = params.head(d);
  const Eigen::VectorXd margins = signed_y_.cwiseProduct(
      x_ * w + Eigen::VectorXd::Constant(x_.rows(), params[d]));
  Eigen::VectorXd curv(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double m = margins[i];
    const double d2 = kind_ == ClassifierKind::kLogReg ? LogisticLossCurvature(m)
                                                       : (m < 1.0 ? 2.0 : 0.0);
    curv[i] = c_ * sample_weight_[i] * d2;
  }
  Eigen::MatrixXd aug(x_.rows(), d + 1);
  aug.leftCols(d) = x_;
  aug.col(d).setOnes();
  Eigen::MatrixXd h = aug.transpose() * curv.asDiagonal() * aug;
  h.topLeftCorner(d, d).diagonal().array() += 1.0;
  return h;
}

LinearModel Fit(ClassifierKind kind, const Eigen::MatrixXd& x,
                std::span<const int> y, const FitOptions& options) {
  if (static_cast<size_t>(x.rows()) != y.size()) {
    throw Error(ErrorKind::kInput, "feature rows and labels differ in count");
  }
  if (!x.allFinite()) throw Error(ErrorKind::kInput, "non-finite feature value");
  if (!(options.c > 0.0)) throw Error(ErrorKind::kArgument, "C must be positive");
  size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorKind::kInput, "label not in {0, 1}");
    positives += label == 1;
  }
  if (positives < 2 || y.size() - positives < 2) {
    throw Error(ErrorKind::kDegenerateLabels,
                "fit needs at least two rows of each class");
  }

  LinearModel model;
  model.kind = kind;
  model.c = options.c;
  model.seed = options.seed;
  model.standardizer = Standardizer::Fit(x);
  const LinearObjective objective(kind, model.standardizer.Transform(x), y,
                                  ComputeClassWeights(y), options.c);

  const auto d = static_cast<Eigen::Index>(x.cols());
  // The objective is convex and the optimizer deterministic, so the start
  // point is fixed at the origin; the seed is carried for provenance.
  Eigen::VectorXd params = Eigen::VectorXd::Zero(d + 1);
  double value = objective.Value(params);
  Eigen::VectorXd grad = objective.Gradient(params);
  if (options.record_trace) model.objective_trace.push_back(value);

  double gd_step = 1.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (grad.norm() <= options.gradient_tolerance) break;

    Eigen::VectorXd direction;
    double step = 1.0;
    if (options.solver == Solver::kNewton) {
      Eigen::MatrixXd h = objective.Hessian(params);
      // The bias curvature vanishes for the squared hinge when no margin is
      // active.
      h.diagonal().array() += 1e-12;
      direction = h.ldlt().solve(-grad);
      if (!direction.allFinite() || direction.dot(grad) >= 0.0) direction = -grad;
    } else {
      direction = -grad;
      step = gd_step * 2.0;
    }

    const double slope = grad.dot(direction);
    // Below this the objective cannot resolve the expected decrease.
    const double resolution = kObjectiveResolution * std::max(1.0, std::abs(value));
    Eigen::VectorXd candidate;
    Eigen::VectorXd candidate_grad;
    double candidate_value = value;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings, step *= 0.5) {
      candidate = params + step * direction;
      candidate_value = objective.Value(candidate);
      if (candidate_value <= value + 1e-4 * step * slope &&
          candidate_value < value) {
        candidate_grad = objective.Gradient(candidate);
        accepted = true;
        break;
      }
      if (-slope * step <= resolution && candidate_value <= value + resolution) {
        candidate_grad = objective.Gradient(candidate);
        if (candidate_grad.norm() < grad.norm()) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;  // no further progress
    gd_step = step;
    params = std::move(candidate);
    value = candidate_value;
    grad = std::move(candidate_grad);
    if (options.record_trace) model.objective_trace.push_back(value);
  }

  model.weights.assign(params.data(), params.data() + d);
  model.bias = params[d];
  model.gradient_norm = grad.norm();
  model.iterations = iter;
  model.converged = model.gradient_norm <= options.gradient_tolerance;
  return model;
}

double DecisionScore(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw Error(ErrorKind::kInput, "feature dimension " + std::to_string(x.size()) +
                                       " != model dimension " +
                                       std::to_string(model.dim()));
  }
  double s = model.bias;
  for (size_t j = 0; j < x.size(); ++j) {
    s += model.weights[j] *
         ((x[j] - model.standardizer.mean[j]) / model.standardizer.scale[j]);
  }
  return s;
}

std::vector<double> DecisionScores(const LinearModel& model,
                                   const Eigen::MatrixXd& x) {
  std::vector<double> out(x.rows());
  std::vector<double> row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[j] = x(i, j);
    out[i] = DecisionScore(model, row);
  }
  return out;
}

void WriteModel(const LinearModel& model, std::ostream& out) {
  out << "model " << ClassifierName(model.kind) << '\n';
  out << "c " << FormatRoundTrip(model.c) << '\n';
  out << "seed " << model.seed << '\n';
  out << "dim " << model.dim() << '\n';
  WriteVector(out, "mean", model.standardizer.mean);
  WriteVector(out, "scale", model.standardizer.scale);
  WriteVector(out, "weights", model.weights);
  out << "bias " << FormatRoundTrip(model.bias) << '\n';
  out << "gradient_norm " << FormatRoundTrip(model.gradient_norm) << '\n';
  out << "iterations " << model.iterations << '\n';
  out << "converged " << (model.converged ? 1 : 0) << '\n';
}

LinearModel ReadModel(std::istream& in) {
  LinearModel m;
  std::string tok;
  {
    auto ss = ExpectLine(in, "model");
    ss >> tok;
    try {
      m.kind = ParseClassifier(tok);
    } catch (const Error&) {
      throw Error(ErrorKind::kFormat, "unknown model kind '" + tok + "'");
    }
  }
  {
    auto ss = ExpectLine(in, "c");
    m.c = ReadVector(ss, 1)[0];
  }
  {
    auto ss = ExpectLine(in, "seed");
    if (!(ss >> m.seed)) throw Error(ErrorKind::kFormat, "bad seed");
  }
  size_t dim = 0;
  {
    auto ss = ExpectLine(in, "dim");
    if (!(ss >> dim)) throw Error(ErrorKind::kFormat, "bad dim");
  }
  {
    auto ss = ExpectLine(in, "mean");
    m.standardizer.mean = ReadVector(ss, dim);
  }
  {
    auto ss = ExpectLine(in, "scale");
    m.standardizer.scale = ReadVector(ss, dim);
  }
  {
    auto ss = ExpectLine(in, "weights");
    m.weights = ReadVector(ss, dim);
  }
  {
    auto ss = ExpectLine(in, "bias");
    m.bias = ReadVector(ss, 1)[0];
  }
  {
    auto ss = ExpectLine(in, "gradient_norm");
    m.gradient_norm = ReadVector(ss, 1)[0];
  }
  {
    auto ss = ExpectLine(in, "iterations");
    if (!(ss >> m.iterations)) throw Error(ErrorKind::kFormat, "bad iterations");
  }
  {
    auto ss = ExpectLine(in, "converged");
    int flag = 0;
    if (!(ss >> flag)) throw Error(ErrorKind::kFormat, "bad converged flag");
    m.converged = flag != 0;
  }
  return m;
}

}  // namespace haltrag
