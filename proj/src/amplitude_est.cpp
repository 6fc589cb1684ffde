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

#include "reducechop/amplitude_est.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"
#include "reducechop/simulator.hpp"
#include "reducechop/statevector.hpp"

namespace reducechop {

namespace {

// Wald estimate of 2p-1 from `shots` Bernoulli draws at success rate p.
double sampled_component(double p, std::uint64_t shots, Rng& rng) {
  const double clipped = std::clamp(p, 0.0, 1.0);
  std::uint64_t successes = 0;
  for (std::uint64_t i = 0; i < shots; ++i) {
    if (rng.uniform() < clipped) ++successes;
  }
  return 2.0 * (static_cast<double>(successes) / static_cast<double>(shots)) - 1.0;
}

// Probability of the added control reading 0 after one interference pass.
// `imaginary` inserts the quarter-turn that swaps the measured quadrature.
double ancilla_zero_probability(const Circuit& u1, std::uint64_t basis, bool imaginary) {
  const int n = u1.qubits();
  Statevector state(n + 1);  // control is qubit 0, register shifts up by one
  apply_gate_in_place(state, Gate::h(0));
  if (imaginary) apply_gate_in_place(state, Gate::phase(0, -std::numbers::pi / 2.0));
  for (const auto& layer : u1.layers()) {
    for (const Gate& gate : layer) {
      Gate shifted = gate;
      shifted.q0 += 1;
      if (shifted.arity() == 2) shifted.q1 += 1;
      apply_controlled_in_place(state, shifted, 0);
    }
  }
  // Controlled basis flip maps the target bitstring onto |0...0| so the
  // interference closes on <b|u1|0>.
  for (int q = 0; q < n; ++q) {
    if (qubit_bit(basis, n, q) == 1) {
      apply_controlled_in_place(state, Gate::x(q + 1), 0);
    }
  }
  apply_gate_in_place(state, Gate::h(0));
  double p0 = 0.0;
  const std::size_t half = std::size_t{1} << n;
  for (std::size_t i = 0; i < half; ++i) p0 += std::norm(state[i]);
  return p0;
}

}  // namespace

void ShotBudget::validate() const {
  if (probability_shots < 1 || amplitude_shots < 1) {
    fail("bad_budget", "shot counts must both be >= 1");
  }
}

std::complex<double> hadamard_test_amplitude(const Circuit& u1, const std::string& b,
                                             std::uint64_t shots, Rng& rng) {
  const std::uint64_t basis = parse_bitstring(b, u1.qubits());
  const std::complex<double> exact = run_circuit(u1)[basis];
  if (shots == kExactShots) return exact;
  const double re = sampled_component((1.0 + exact.real()) / 2.0, shots, rng);
  const double im = sampled_component((1.0 + exact.imag()) / 2.0, shots, rng);
  return {re, im};
}

std::complex<double> hadamard_test_amplitude_ancilla(const Circuit& u1,
                                                     const std::string& b,
                                                     std::uint64_t shots, Rng& rng) {
  const std::uint64_t basis = parse_bitstring(b, u1.qubits());
  const double p_re = ancilla_zero_probability(u1, basis, false);
  const double p_im = ancilla_zero_probability(u1, basis, true);
  if (shots == kExactShots) return {2.0 * p_re - 1.0, 2.0 * p_im - 1.0};
  const double re = sampled_component(p_re, shots, rng);
  const double im = sampled_component(p_im, shots, rng);
  return {re, im};
}

std::map<std::string, std::complex<double>> estimate_support_amplitudes(
    const Circuit& u1, const CBEstimate& estimate, std::uint64_t shots, Rng& rng) {
  if (estimate.K < 1 || static_cast<std::size_t>(estimate.K) > estimate.support.size()) {
    fail("bad_argument", "estimate does not delimit a retained support");
  }
  std::map<std::string, std::complex<double>> out;
  for (int i = 0; i < estimate.K; ++i) {
    const std::string& bits = estimate.support[i].bits;
    Rng child = rng.child(static_cast<std::uint64_t>(i));
    out[bits] = hadamard_test_amplitude(u1, bits, shots, child);
  }
  return out;
}

SparseState reconstruct_state(const CBEstimate& estimate,
                              const std::map<std::string, std::complex<double>>& amplitudes,
                              PhaseMode mode) {
  if (estimate.K < 1 || static_cast<std::size_t>(estimate.K) > estimate.support.size()) {
    fail("bad_argument", "estimate does not delimit a retained support");
  }
  if (amplitudes.size() != static_cast<std::size_t>(estimate.K)) {
    fail("bad_argument", "amplitudes must cover exactly the retained support");
  }
  double norm2 = 0.0;
  for (int i = 0; i < estimate.K; ++i) {
    const auto it = amplitudes.find(estimate.support[i].bits);
    if (it == amplitudes.end()) {
      fail("bad_argument", "missing amplitude for " + estimate.support[i].bits);
    }
    norm2 += std::norm(it->second);
  }
  if (!(norm2 > 0.0)) fail("degenerate_state", "all amplitude estimates are zero");

  SparseState out;
  out.n = static_cast<int>(estimate.support.front().bits.size());
  out.renorm_factor = 1.0 / std::sqrt(norm2);
  for (const auto& [bits, amp] : amplitudes) {
    out.entries[bits] = amp * out.renorm_factor;
  }
  if (mode == PhaseMode::kRelative) {
    const std::complex<double> anchor = out.entries.at(estimate.support.front().bits);
    const double mag = std::abs(anchor);
    if (mag <= kTol.amplitude_floor) {
      fail("degenerate_state", "anchor amplitude too small to fix the phase");
    }
    const std::complex<double> rotation = std::conj(anchor) / mag;
    for (auto& [bits, amp] : out.entries) amp *= rotation;
  }
  out.validate();
  return out;
}

double fidelity_lower_bound(double eps, int K, std::uint64_t amplitude_shots,
                            std::uint64_t m, std::uint64_t probability_shots) {
  if (!(eps > 0.0) || eps >= 1.0) fail("bad_argument", "eps must lie in (0, 1)");
  if (K < 1) fail("bad_argument", "K must be positive");
  if (amplitude_shots < 1) fail("bad_argument", "amplitude shots must be positive");
  if (probability_shots < 1) fail("bad_argument", "probability shots must be positive");
  if (m >= probability_shots) {
    fail("bad_argument", "residual m must be below the probability shot count");
  }
  const double delta = static_cast<double>(m) / static_cast<double>(probability_shots);
  const double value =
      1.0 - eps -
      static_cast<double>(K) / (2.0 * static_cast<double>(amplitude_shots) * (1.0 - delta));
  return std::max(0.0, value);
}

}  // namespace reducechop
