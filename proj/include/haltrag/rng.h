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

#ifndef HALTRAG_RNG_H_
#define HALTRAG_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace haltrag {

// Derives an independent seed for a named consumer of the run seed
// ("split", "synthetic", "optimizer", ...).
uint64_t SubstreamSeed(uint64_t seed, std::string_view name);

uint64_t SplitMix64(uint64_t x);

// Deterministic across standard libraries: the engine output is fixed by the
// standard, and every distribution below is implemented here rather than
// taken from <random>, whose distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, bound).
  uint64_t UniformInt(uint64_t bound);

  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace haltrag

#endif  // HALTRAG_RNG_H_
