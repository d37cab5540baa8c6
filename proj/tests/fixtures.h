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

// Shared test data.

#ifndef HALTRAG_TESTS_FIXTURES_H_
#define HALTRAG_TESTS_FIXTURES_H_

#include "haltrag/corpus.h"
#include "haltrag/features.h"
#include "haltrag/nli_backend.h"

namespace haltrag::testing_data {

// Feature matrix of the planted synthetic dataset, scored through its own
// score tables.
inline FeatureMatrix PlantedFeatures(size_t n, uint64_t seed,
                                     const FeatureMask& mask = {}) {
  auto data = GenerateSynthetic(n, seed);
  LookupBackend a(std::move(data.scores_a)), b(std::move(data.scores_b));
  return ExtractFeatures(data.examples, a, b, mask);
}

// Cached n = 2000, seed = 7 matrix.
inline const FeatureMatrix& Planted2000() {
  static const FeatureMatrix m = PlantedFeatures(2000, 7);
  return m;
}

}  // namespace haltrag::testing_data

#endif  // HALTRAG_TESTS_FIXTURES_H_
