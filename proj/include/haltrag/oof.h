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

#ifndef HALTRAG_OOF_H_
#define HALTRAG_OOF_H_

#include <cstdint>
#include <span>
#include <vector>

#include "haltrag/calibration.h"
#include "haltrag/corpus.h"
#include "haltrag/models.h"

namespace haltrag {

struct FoldAssignment {
  size_t k = 5;
  uint64_t seed = 0;
  std::vector<size_t> fold_of;  // fold index per example

  std::vector<size_t> FoldSizes() const;
  std::vector<size_t> Members(size_t fold) const;
  std::vector<size_t> Complement(size_t fold) const;
};

// Seeded Fisher-Yates permutation, then contiguous chunks; the first n % k
// folds get one extra element. Throws kArgument unless n >= k >= 2.
FoldAssignment KFoldSplit(size_t n, size_t k, uint64_t seed);

// Same fold sizes, but the permuted indices are grouped by class before being
// dealt round-robin, so every fold sees both classes whenever possible.
FoldAssignment StratifiedKFoldSplit(std::span<const int> labels, size_t k,
                                    uint64_t seed);

struct OofConfig {
  ClassifierKind classifier = ClassifierKind::kLogReg;
  CalibrationMethod calibration = CalibrationMethod::kIsotonic;
  size_t k = 5;
  uint64_t seed = 0;
  double c = 1.0;
  bool stratified = false;
  // Train folds on worker threads; results are assembled in fold order.
  bool parallel = false;
};

struct OofResult {
  std::vector<double> raw_scores;
  std::vector<double> calibrated;
  FoldAssignment folds;
  Calibrator calibrator;
  std::vector<LinearModel> fold_models;
  LinearModel final_model;
  // Training row count per fold; the training set of fold j is every row
  // whose fold index differs from j.
  std::vector<size_t> training_sizes;
};

Eigen::MatrixXd ToEigen(const FeatureMatrix& m);
Eigen::MatrixXd SelectRows(const Eigen::MatrixXd& x, std::span<const size_t> rows);

// Every example is scored by the one model whose training rows exclude its
// fold. Throws kStratification if a training fold lacks a class.
OofResult RunOof(const FeatureMatrix& features, const OofConfig& config);

}  // namespace haltrag

#endif  // HALTRAG_OOF_H_
