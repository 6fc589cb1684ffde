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

#ifndef REDUCECHOP_AMPLITUDE_EST_HPP
#define REDUCECHOP_AMPLITUDE_EST_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include "reducechop/cb_rank.hpp"
#include "reducechop/circuit.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/sparse_state.hpp"

namespace reducechop {

// Shot counts for one estimation pass: `probability_shots` per sample set of
// the rank scan, `amplitude_shots` per quadrature per retained bitstring.
struct ShotBudget {
  std::uint64_t probability_shots = 0;
  std::uint64_t amplitude_shots = 0;

  void validate() const;  // both must be >= 1
};

// Passing 0 shots to the amplitude estimators returns the exact value
// instead of a sampled one.
inline constexpr std::uint64_t kExactShots = 0;

// How reconstructed amplitudes are phased: as estimated, or rotated so the
// heaviest support element is real non-negative.
enum class PhaseMode { kAbsolute, kRelative };

// Estimate of <b|u1|0>. Each quadrature is a Wald estimate from `shots`
// Bernoulli draws whose success probability embeds the exact value
// ((1 + Re a)/2 for the real part, likewise Im for the imaginary part).
std::complex<double> hadamard_test_amplitude(const Circuit& u1, const std::string& b,
                                             std::uint64_t shots, Rng& rng);

// Same estimate through an explicit ancilla interference circuit (H on an
// added control, controlled u1 and basis-flip, H, then measure the control).
// Statistically identical to hadamard_test_amplitude; exponentially more
// expensive, kept as a cross-check for small registers.
std::complex<double> hadamard_test_amplitude_ancilla(const Circuit& u1,
                                                     const std::string& b,
                                                     std::uint64_t shots, Rng& rng);

// One amplitude estimate per retained support bitstring, each on an
// independent child rng so the order of evaluation cannot matter.
std::map<std::string, std::complex<double>> estimate_support_amplitudes(
    const Circuit& u1, const CBEstimate& estimate, std::uint64_t shots, Rng& rng);

// Normalizes the estimated amplitudes of the retained support into a unit
// sparse state. `amplitudes` must cover exactly the top-K support entries.
SparseState reconstruct_state(const CBEstimate& estimate,
                              const std::map<std::string, std::complex<double>>& amplitudes,
                              PhaseMode mode = PhaseMode::kAbsolute);

// Certified fidelity floor for a reconstruction accepted at residual m:
// 1 - eps - K/(2 shots (1 - m/M_p)), clipped at 0. Holds with confidence
// 1 - hoeffding_bound(M_p, eps, m).
double fidelity_lower_bound(double eps, int K, std::uint64_t amplitude_shots,
                            std::uint64_t m, std::uint64_t probability_shots);

}  // namespace reducechop

#endif
