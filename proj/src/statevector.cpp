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

#include "reducechop/statevector.hpp"

#include <cmath>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"

namespace reducechop {

std::string to_bitstring(std::uint64_t index, int qubits) {
  std::string out(static_cast<std::size_t>(qubits), '0');
  for (int q = 0; q < qubits; ++q) {
    if (qubit_bit(index, qubits, q)) out[static_cast<std::size_t>(q)] = '1';
  }
  return out;
}

std::uint64_t parse_bitstring(const std::string& bits, int qubits) {
  if (static_cast<int>(bits.size()) != qubits) {
    fail("bad_bitstring", "expected " + std::to_string(qubits) +
                              " characters, got '" + bits + "'");
  }
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      fail("bad_bitstring", "bitstring may only contain 0 and 1: '" + bits + "'");
    }
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

namespace {

void check_width(int n) {
  if (n < 1) fail("bad_qubit_count", "need at least 1 qubit");
  if (n > max_qubits()) {
    fail("bad_qubit_count",
         "qubit count " + std::to_string(n) + " exceeds the cap of " +
             std::to_string(max_qubits()) +
             " (override with REDUCECHOP_MAX_QUBITS)");
  }
}

}  // namespace

Statevector::Statevector(int n) : n_(n) {
  check_width(n);
  amps_.assign(std::size_t{1} << n, 0.0);
  amps_[0] = 1.0;
}

Statevector::Statevector(int n, std::vector<std::complex<double>> amps)
    : n_(n), amps_(std::move(amps)) {
  check_width(n);
  if (amps_.size() != (std::size_t{1} << n)) {
    fail("bad_state", "amplitude count must be 2^n");
  }
  check_norm();
}

double Statevector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

double Statevector::norm_error() const { return std::abs(norm() - 1.0); }

void Statevector::check_norm() const {
  if (norm_error() > kTol.state_norm) {
    fail("bad_norm", "statevector norm drifted by " + std::to_string(norm_error()));
  }
}

double Statevector::probability(std::uint64_t basis) const {
  if (basis >= amps_.size()) fail("bad_basis", "basis index out of range");
  return std::norm(amps_[basis]);
}

nlohmann::json Statevector::to_json() const {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : amps_) {
    amps.push_back(nlohmann::json::array({a.real(), a.imag()}));
  }
  return nlohmann::json{{"n", n_}, {"amplitudes", std::move(amps)}};
}

Statevector Statevector::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("amplitudes")) {
    fail("bad_state_json", "expected {\"n\": int, \"amplitudes\": [[re, im], ...]}");
  }
  int n = j.at("n").get<int>();
  std::vector<std::complex<double>> amps;
  for (const auto& entry : j.at("amplitudes")) {
    if (!entry.is_array() || entry.size() != 2) {
      fail("bad_state_json", "amplitudes must be [re, im] pairs");
    }
    amps.emplace_back(entry[0].get<double>(), entry[1].get<double>());
  }
  return Statevector(n, std::move(amps));
}

double fidelity(const Statevector& a, const Statevector& b) {
  if (a.qubits() != b.qubits()) {
    fail("bad_state", "fidelity requires equal qubit counts");
  }
  std::complex<double> overlap = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    overlap += std::conj(a[i]) * b[i];
  }
  return std::norm(overlap);
}

}  // namespace reducechop
