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

#ifndef REDUCECHOP_ANSATZ_HPP
#define REDUCECHOP_ANSATZ_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "reducechop/circuit.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/simulator.hpp"

namespace reducechop {

// Transverse-field-Ising-style ansatz: per layer, one RX rotation per qubit
// followed by one ZZ rotation per ring edge (0,1), (1,2), ..., (n-1,0).
// Parameters are layer-major, RX angles before ZZ angles within a layer.
// The ring edges are laid out in non-overlapping matchings for simulation;
// for depth accounting each layer counts as 4 entangling layers (every ZZ
// costs two CNOTs and the ring needs two matchings), independent of the
// structural layer list.
struct TfimAnsatz {
  int n = 0;
  int layers = 0;

  std::size_t param_count() const { return static_cast<std::size_t>(layers) * 2 * n; }
  int reported_depth() const { return 4 * layers; }
  Circuit circuit(std::span<const double> phi) const;
};

// Hardware-efficient ansatz: per layer, one U3 per qubit followed by CZ
// gates covering the ring in two alternating neighbor matchings (even pairs
// then odd pairs, the odd matching closing the cycle when n is even), plus
// a final U3 layer. Parameters are layer-major, 3 angles per qubit.
struct HeaAnsatz {
  int n = 0;
  int layers = 0;

  std::size_t param_count() const {
    return static_cast<std::size_t>(3) * n * (layers + 1);
  }
  int reported_depth() const { return 2 * layers; }
  Circuit circuit(std::span<const double> theta) const;
};

Circuit build_tfim(int n, int l_u, std::span<const double> phi);
Circuit build_hea(int n, int l_r, std::span<const double> theta);

// Normalized cos(pi t/2)|0...0> + sin(pi t/2) U1|0...0>. The interpolation
// operator is not unitary, so the result is renormalized; a norm below the
// degenerate cutoff raises (only possible when U1|0> is close to -|0>).
Statevector soft_activated_state(const Circuit& u1, double t);

// First `active` parameters kept, the rest zeroed.
std::vector<double> parametric_activation(std::span<const double> phi_full,
                                          std::size_t active);

// Uniform angles on [0, 2*pi).
std::vector<double> random_params(std::size_t count, Rng& rng);

}  // namespace reducechop

#endif
