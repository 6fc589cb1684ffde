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

#include "reducechop/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"

namespace reducechop {

namespace {

using cplx = std::complex<double>;

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    fail("bad_gate", "gate targets qubit " + std::to_string(q) +
                         " outside register of width " + std::to_string(n));
  }
}

// Applies a 2x2 matrix on qubit q, restricted to ctrl_mask bits all set
// (ctrl_mask = 0 means unconditional).
void apply_single(Statevector& state, int q, const std::array<cplx, 4>& m,
                  std::uint64_t ctrl_mask) {
  const int n = state.qubits();
  const std::size_t dim = state.dimension();
  const std::size_t stride = std::size_t{1} << (n - 1 - q);
  auto& amps = state.amplitudes();
  for (std::size_t block = 0; block < dim; block += 2 * stride) {
    for (std::size_t offset = 0; offset < stride; ++offset) {
      const std::size_t i0 = block + offset;
      if ((i0 & ctrl_mask) != ctrl_mask) continue;
      const std::size_t i1 = i0 + stride;
      const cplx a = amps[i0], b = amps[i1];
      amps[i0] = m[0] * a + m[1] * b;
      amps[i1] = m[2] * a + m[3] * b;
    }
  }
}

void apply_two(Statevector& state, const Gate& gate, std::uint64_t ctrl_mask) {
  const int n = state.qubits();
  const std::size_t dim = state.dimension();
  auto& amps = state.amplitudes();
  const std::uint64_t mask0 = std::uint64_t{1} << (n - 1 - gate.q0);
  const std::uint64_t mask1 = std::uint64_t{1} << (n - 1 - gate.q1);
  switch (gate.kind) {
    case GateKind::kCnot:
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & ctrl_mask) != ctrl_mask) continue;
        if ((i & mask0) && !(i & mask1)) std::swap(amps[i], amps[i | mask1]);
      }
      return;
    case GateKind::kCz:
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & ctrl_mask) != ctrl_mask) continue;
        if ((i & mask0) && (i & mask1)) amps[i] = -amps[i];
      }
      return;
    case GateKind::kZz: {
      const cplx aligned = std::exp(cplx(0, -gate.params[0] / 2));
      const cplx opposed = std::conj(aligned);
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & ctrl_mask) != ctrl_mask) continue;
        bool same = static_cast<bool>(i & mask0) == static_cast<bool>(i & mask1);
        amps[i] *= same ? aligned : opposed;
      }
      return;
    }
    default:
      fail("bad_gate", "not a two-qubit gate");
  }
}

void apply_impl(Statevector& state, const Gate& gate, std::uint64_t ctrl_mask) {
  const int n = state.qubits();
  check_qubit(gate.q0, n);
  if (gate.arity() == 2) {
    check_qubit(gate.q1, n);
    if (gate.q0 == gate.q1) fail("bad_gate", "two-qubit gate needs distinct qubits");
    apply_two(state, gate, ctrl_mask);
  } else {
    apply_single(state, gate.q0, gate.matrix1(), ctrl_mask);
  }
}

}  // namespace

void apply_gate_in_place(Statevector& state, const Gate& gate) {
  apply_impl(state, gate, 0);
}

void apply_controlled_in_place(Statevector& state, const Gate& gate, int control) {
  const int n = state.qubits();
  check_qubit(control, n);
  if (control == gate.q0 || (gate.arity() == 2 && control == gate.q1)) {
    fail("bad_gate", "control qubit overlaps gate target");
  }
  apply_impl(state, gate, std::uint64_t{1} << (n - 1 - control));
}

Statevector apply_gate(Statevector state, const Gate& gate) {
  apply_gate_in_place(state, gate);
  return state;
}

Statevector run_circuit(const Circuit& circuit, const std::optional<Statevector>& initial) {
  Statevector state = initial.value_or(Statevector(circuit.qubits()));
  if (state.qubits() != circuit.qubits()) {
    fail("bad_state", "initial state width does not match circuit");
  }
  for (const auto& layer : circuit.layers()) {
    for (const auto& gate : layer) apply_gate_in_place(state, gate);
  }
  state.check_norm();
  return state;
}

double probability(const Statevector& state, std::uint64_t basis) {
  return state.probability(basis);
}

std::vector<std::uint64_t> sample(const Statevector& state, std::size_t shots, Rng& rng) {
  ShotSource source = ShotSource::from_state(state);
  std::vector<std::uint64_t> out;
  out.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) out.push_back(source.draw(rng));
  return out;
}

ShotSource::ShotSource(std::vector<double> probabilities) {
  if (probabilities.empty()) fail("bad_distribution", "empty distribution");
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) fail("bad_distribution", "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail("bad_distribution", "probabilities sum to " + std::to_string(total));
  }
  cumulative_.resize(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

ShotSource ShotSource::from_state(const Statevector& state) {
  std::vector<double> probs(state.dimension());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(state[i]);
  return ShotSource(std::move(probs));
}

std::uint64_t ShotSource::draw(Rng& rng) const {
  double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

void ShotSource::draw_counts(std::size_t shots, Rng& rng,
                             std::vector<std::uint32_t>& counts) const {
  counts.assign(cumulative_.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) ++counts[draw(rng)];
}

}  // namespace reducechop
