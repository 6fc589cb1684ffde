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

#ifndef REDUCECHOP_STATEVECTOR_HPP
#define REDUCECHOP_STATEVECTOR_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace reducechop {

// Basis convention: index i encodes the bitstring whose first character is
// qubit 0, i.e. qubit 0 is the most significant bit of i.
std::string to_bitstring(std::uint64_t index, int qubits);
std::uint64_t parse_bitstring(const std::string& bits, int qubits);

// Bit of qubit q inside basis index i for an n-qubit register.
inline int qubit_bit(std::uint64_t index, int n, int q) {
  return static_cast<int>((index >> (n - 1 - q)) & 1u);
}

// Dense n-qubit state, 2^n complex amplitudes, unit norm.
class Statevector {
 public:
  // |0...0> on n qubits.
  explicit Statevector(int n);
  Statevector(int n, std::vector<std::complex<double>> amps);

  int qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }

  std::complex<double>& operator[](std::size_t i) { return amps_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return amps_[i]; }

  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
  std::vector<std::complex<double>>& amplitudes() { return amps_; }

  double norm() const;
  // Distance of the norm from 1; raise if above the shared tolerance.
  double norm_error() const;
  void check_norm() const;

  double probability(std::uint64_t basis) const;

  nlohmann::json to_json() const;
  static Statevector from_json(const nlohmann::json& j);

 private:
  int n_;
  std::vector<std::complex<double>> amps_;
};

// Squared overlap |<a|b>|^2 of two equal-width states.
double fidelity(const Statevector& a, const Statevector& b);

}  // namespace reducechop

#endif
