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

#ifndef REDUCECHOP_SIMULATOR_HPP
#define REDUCECHOP_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "reducechop/circuit.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/statevector.hpp"

namespace reducechop {

void apply_gate_in_place(Statevector& state, const Gate& gate);

// Same kernel restricted to the subspace where `control` is 1; used by the
// ancilla-interference cross-check.
void apply_controlled_in_place(Statevector& state, const Gate& gate, int control);

Statevector apply_gate(Statevector state, const Gate& gate);

// Applies all layers in order to `initial` (|0...0> when absent) and checks
// the final norm.
Statevector run_circuit(const Circuit& circuit,
                        const std::optional<Statevector>& initial = std::nullopt);

double probability(const Statevector& state, std::uint64_t basis);

// `shots` independent computational-basis draws, in draw order.
std::vector<std::uint64_t> sample(const Statevector& state, std::size_t shots, Rng& rng);

// Reusable computational-basis sampler over a fixed distribution. Holds the
// cumulative table once so repeated draws stay cheap.
class ShotSource {
 public:
  // From an explicit probability vector (must sum to 1 within 1e-9).
  explicit ShotSource(std::vector<double> probabilities);
  static ShotSource from_state(const Statevector& state);

  std::size_t dimension() const { return cumulative_.size(); }
  std::uint64_t draw(Rng& rng) const;
  // Adds `shots` draws into `counts` (resized/zeroed to the dimension).
  void draw_counts(std::size_t shots, Rng& rng, std::vector<std::uint32_t>& counts) const;

 private:
  std::vector<double> cumulative_;
};

}  // namespace reducechop

#endif
