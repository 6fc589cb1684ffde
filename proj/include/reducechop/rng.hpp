// Copyright 2026 The reducechop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REDUCECHOP_RNG_HPP
#define REDUCECHOP_RNG_HPP

#include <cstdint>
#include <random>

namespace reducechop {

// Seeded generator with hierarchical splitting. Uniform and normal draws
// are generated from raw engine output with fixed algorithms, so identical
// seeds give identical streams on every platform. `child(stream)` derives an
// independent generator from the construction seed alone; it does not
// consume or depend on this generator's draw position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Raw 64 random bits.
  std::uint64_t next();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller (pairs cached).
  double normal();

  // Uniform integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  Rng child(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer; used for seed derivation and config hashing.
std::uint64_t mix_bits(std::uint64_t x);

}  // namespace reducechop

#endif
