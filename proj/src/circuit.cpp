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

#include "reducechop/circuit.hpp"

#include <algorithm>

#include "reducechop/error.hpp"

namespace reducechop {

Circuit::Circuit(int n) : n_(n) {
  if (n < 1) fail("bad_qubit_count", "need at least 1 qubit");
}

std::size_t Circuit::gate_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.size();
  return total;
}

void Circuit::add_layer(std::vector<Gate> gates) {
  std::vector<bool> used(static_cast<std::size_t>(n_), false);
  for (const auto& g : gates) {
    int qubits[2] = {g.q0, g.q1};
    for (int k = 0; k < g.arity(); ++k) {
      int q = qubits[k];
      if (q < 0 || q >= n_) {
        fail("bad_gate", "gate targets qubit " + std::to_string(q) +
                             " outside register of width " + std::to_string(n_));
      }
      if (used[static_cast<std::size_t>(q)]) {
        fail("bad_layer",
             "qubit " + std::to_string(q) + " appears twice in one layer");
      }
      used[static_cast<std::size_t>(q)] = true;
    }
  }
  layers_.push_back(std::move(gates));
}

void Circuit::add_gate(const Gate& gate) { add_layer({gate}); }

int Circuit::entangling_depth() const {
  int depth = 0;
  for (const auto& layer : layers_) {
    bool entangling = std::any_of(layer.begin(), layer.end(),
                                  [](const Gate& g) { return g.arity() == 2; });
    if (entangling) ++depth;
  }
  return depth;
}

Circuit Circuit::dagger() const {
  Circuit out(n_);
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    std::vector<Gate> layer;
    layer.reserve(it->size());
    for (const auto& g : *it) layer.push_back(g.dagger());
    out.add_layer(std::move(layer));
  }
  return out;
}

Circuit Circuit::then(const Circuit& next) const {
  if (next.n_ != n_) fail("bad_circuit", "cannot concatenate different widths");
  Circuit out = *this;
  for (const auto& layer : next.layers_) out.add_layer(layer);
  return out;
}

Circuit Circuit::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > layers_.size()) {
    fail("bad_circuit", "layer slice out of range");
  }
  Circuit out(n_);
  for (std::size_t i = begin; i < end; ++i) out.add_layer(layers_[i]);
  return out;
}

nlohmann::json Circuit::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : layers_) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& g : layer) {
      nlohmann::json targets = nlohmann::json::array({g.q0});
      if (g.arity() == 2) targets.push_back(g.q1);
      nlohmann::json params = nlohmann::json::array();
      for (int k = 0; k < g.param_count(); ++k) params.push_back(g.params[static_cast<std::size_t>(k)]);
      jl.push_back({{"kind", g.kind_name()}, {"targets", targets}, {"params", params}});
    }
    layers.push_back(std::move(jl));
  }
  return nlohmann::json{{"n", n_}, {"layers", std::move(layers)}};
}

Circuit Circuit::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("layers")) {
    fail("bad_circuit_json", "expected {\"n\": int, \"layers\": [[gate, ...], ...]}");
  }
  Circuit out(j.at("n").get<int>());
  for (const auto& jl : j.at("layers")) {
    std::vector<Gate> layer;
    for (const auto& jg : jl) {
      if (!jg.contains("kind") || !jg.contains("targets") || !jg.contains("params")) {
        fail("bad_circuit_json", "gate needs kind, targets, params");
      }
      Gate g;
      g.kind = Gate::kind_from_name(jg.at("kind").get<std::string>());
      const auto& targets = jg.at("targets");
      const auto& params = jg.at("params");
      if (static_cast<int>(targets.size()) != g.arity()) {
        fail("bad_circuit_json", "gate " + g.kind_name() + " expects " +
                                     std::to_string(g.arity()) + " targets");
      }
      g.q0 = targets[0].get<int>();
      if (g.arity() == 2) g.q1 = targets[1].get<int>();
      if (static_cast<int>(params.size()) != g.param_count()) {
        fail("bad_circuit_json", "gate " + g.kind_name() + " expects " +
                                     std::to_string(g.param_count()) + " params");
      }
      for (std::size_t k = 0; k < params.size(); ++k) {
        g.params[k] = params[k].get<double>();
      }
      layer.push_back(g);
    }
    out.add_layer(std::move(layer));
  }
  return out;
}

bool Circuit::operator==(const Circuit& other) const {
  return n_ == other.n_ && layers_ == other.layers_;
}

Circuit ghz_circuit(int n) {
  Circuit c(n);
  c.add_gate(Gate::h(0));
  for (int q = 0; q + 1 < n; ++q) c.add_gate(Gate::cnot(q, q + 1));
  return c;
}

}  // namespace reducechop
