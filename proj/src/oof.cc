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

#include "haltrag/oof.h"

#include <future>
#include <numeric>

#include "haltrag/error.h"
#include "haltrag/rng.h"

namespace haltrag {
namespace {

std::vector<size_t> SeededPermutation(size_t n, uint64_t seed) {
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.UniformInt(i)]);
  }
  return perm;
}

void CheckSplitArgs(size_t n, size_t k) {
  if (k < 2) throw Error(ErrorKind::kArgument, "k must be >= 2");
  if (n < k) {
    throw Error(ErrorKind::kArgument, "cannot split " + std::to_string(n) +
                                          " examples into " + std::to_string(k) +
                                          " folds");
  }
}

}  // namespace

std::vector<size_t> FoldAssignment::FoldSizes() const {
  std::vector<size_t> sizes(k, 0);
  for (size_t f : fold_of) ++sizes[f];
  return sizes;
}

std::vector<size_t> FoldAssignment::Members(size_t fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<size_t> FoldAssignment::Complement(size_t fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment KFoldSplit(size_t n, size_t k, uint64_t seed) {
  CheckSplitArgs(n, k);
  FoldAssignment a;
  a.k = k;
  a.seed = seed;
  a.fold_of.assign(n, 0);
  const auto perm = SeededPermutation(n, seed);
  const size_t base = n / k, extra = n % k;
  size_t pos = 0;
  for (size_t f = 0; f < k; ++f) {
    const size_t size = base + (f < extra ? 1 : 0);
    for (size_t j = 0; j < size; ++j) a.fold_of[perm[pos++]] = f;
  }
  return a;
}

FoldAssignment StratifiedKFoldSplit(std::span<const int> labels, size_t k,
                                    uint64_t seed) {
  CheckSplitArgs(labels.size(), k);
  FoldAssignment a;
  a.k = k;
  a.seed = seed;
  a.fold_of.assign(labels.size(), 0);
  const auto perm = SeededPermutation(labels.size(), seed);
  std::vector<size_t> grouped;
  grouped.reserve(perm.size());
  for (int cls : {1, 0}) {
    for (size_t i : perm) {
      if (labels[i] == cls) grouped.push_back(i);
    }
  }
  for (size_t pos = 0; pos < grouped.size(); ++pos) {
    a.fold_of[grouped[pos]] = pos % k;
  }
  return a;
}

Eigen::MatrixXd ToEigen(const FeatureMatrix& m) {
  Eigen::MatrixXd x(m.rows(), m.dim());
  for (size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (size_t j = 0; j < m.dim(); ++j) x(i, j) = r[j];
  }
  return x;
}

Eigen::MatrixXd SelectRows(const Eigen::MatrixXd& x, std::span<const size_t> rows) {
  Eigen::MatrixXd out(rows.size(), x.cols());
  for (size_t r = 0; r < rows.size(); ++r) out.row(r) = x.row(rows[r]);
  return out;
}

OofResult RunOof(const FeatureMatrix& features, const OofConfig& config) {
  features.Validate();
  const size_t n = features.rows();
  const Eigen::MatrixXd x = ToEigen(features);
  const std::vector<int>& y = features.labels;

  OofResult result;
  result.folds = config.stratified
                     ? StratifiedKFoldSplit(y, config.k, SubstreamSeed(config.seed, "split"))
                     : KFoldSplit(n, config.k, SubstreamSeed(config.seed, "split"));

  FitOptions options;
  options.c = config.c;
  options.seed = SubstreamSeed(config.seed, "optimizer");

  struct FoldJob {
    std::vector<size_t> train;
    std::vector<size_t> held_out;
    std::vector<int> train_labels;
  };
  std::vector<FoldJob> jobs(config.k);
  for (size_t f = 0; f < config.k; ++f) {
    auto& job = jobs[f];
    job.train = result.folds.Complement(f);
    job.held_out = result.folds.Members(f);
    size_t positives = 0;
    for (size_t i : job.train) {
      job.train_labels.push_back(y[i]);
      positives += y[i] == 1;
    }
    if (positives < 2 || job.train.size() - positives < 2) {
      throw Error(ErrorKind::kStratification,
                  "training set for fold " + std::to_string(f) +
                      " lacks a class (needs two rows of each); try another "
                      "seed or stratified mode");
    }
    result.training_sizes.push_back(job.train.size());
  }

  const auto train_fold = [&](size_t f) {
    return Fit(config.classifier, SelectRows(x, jobs[f].train),
               jobs[f].train_labels, options);
  };
  result.fold_models.resize(config.k);
  if (config.parallel) {
    std::vector<std::future<LinearModel>> futures;
    for (size_t f = 0; f < config.k; ++f) {
      futures.push_back(std::async(std::launch::async, train_fold, f));
    }
    for (size_t f = 0; f < config.k; ++f) result.fold_models[f] = futures[f].get();
  } else {
    for (size_t f = 0; f < config.k; ++f) result.fold_models[f] = train_fold(f);
  }

  result.raw_scores.assign(n, 0.0);
  for (size_t f = 0; f < config.k; ++f) {
    for (size_t i : jobs[f].held_out) {
      result.raw_scores[i] = DecisionScore(result.fold_models[f], features.row(i));
    }
  }

  result.calibrator = FitCalibrator(config.calibration, result.raw_scores, y);
  result.calibrated = result.calibrator.Apply(result.raw_scores);
  result.final_model = Fit(config.classifier, x, y, options);
  return result;
}

}  // namespace haltrag
