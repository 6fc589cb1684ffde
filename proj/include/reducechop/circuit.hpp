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

#ifndef REDUCECHOP_CIRCUIT_HPP
#define REDUCECHOP_CIRCUIT_HPP

#include <vector>

#include <json.hpp>

#include "reducechop/gate.hpp"

namespace reducechop {

// Ordered layers of gates; within a layer all target qubits are disjoint.
class Circuit {
 public:
  explicit Circuit(int n);

  int qubits() const { return n_; }
  const std::vector<std::vector<Gate>>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t gate_count() const;

  // Validates qubit ranges and in-layer disjointness.
  void add_layer(std::vector<Gate> gates);
  void add_gate(const Gate& gate);  // single-gate layer

  // Number of layers containing at least one two-qubit gate, recomputed
  // from the layer list.
  int entangling_depth() const;

  // Reversed layer order with every gate inverted.
  Circuit dagger() const;

  // This circuit followed by `next` (qubit counts must match).
  Circuit then(const Circuit& next) const;

  // Layers [begin, end) as a standalone circuit.
  Circuit slice(std::size_t begin, std::size_t end) const;

  nlohmann::json to_json() const;
  static Circuit from_json(const nlohmann::json& j);

  bool operator==(const Circuit& other) const;

 private:
  int n_;
  std::vector<std::vector<Gate>> layers_;
};

// H on qubit 0 followed by a cascade of CNOTs; maps |0...0> to
// (|0...0> + |1...1>)/sqrt(2).
Circuit ghz_circuit(int n);

}  // namespace reducechop

#endif
