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

#include "reducechop/sparse_state.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"

namespace reducechop {

double SparseState::norm() const {
  double sum = 0.0;
  for (const auto& [bits, amp] : entries) sum += std::norm(amp);
  return std::sqrt(sum);
}

void SparseState::validate() const {
  if (n < 1) fail("bad_sparse_state", "qubit count must be positive");
  if (entries.empty()) fail("bad_sparse_state", "sparse state has no entries");
  for (const auto& [bits, amp] : entries) {
    parse_bitstring(bits, n);  // checks width and charset
    (void)amp;
  }
  if (!(renorm_factor > 0.0)) {
    fail("bad_sparse_state", "renormalization factor must be positive");
  }
  const double drift = std::abs(norm() - 1.0);
  if (drift > kTol.sparse_norm) {
    fail("bad_norm", "sparse state norm off by " + std::to_string(drift));
  }
}

Statevector SparseState::to_statevector() const {
  validate();
  std::vector<std::complex<double>> amps(std::size_t{1} << n, 0.0);
  for (const auto& [bits, amp] : entries) amps[parse_bitstring(bits, n)] = amp;
  return Statevector(n, std::move(amps));
}

nlohmann::json SparseState::to_json() const {
  nlohmann::json obj;
  obj["n"] = n;
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [bits, amp] : entries) {
    table[bits] = nlohmann::json::array({amp.real(), amp.imag()});
  }
  obj["entries"] = std::move(table);
  obj["renorm"] = renorm_factor;
  return obj;
}

SparseState SparseState::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries") ||
      !j.contains("renorm")) {
    fail("bad_sparse_json", "expected object with n, entries, renorm");
  }
  SparseState out;
  out.n = j.at("n").get<int>();
  out.renorm_factor = j.at("renorm").get<double>();
  const auto& table = j.at("entries");
  if (!table.is_object()) fail("bad_sparse_json", "entries must be an object");
  for (const auto& [bits, pair] : table.items()) {
    if (!pair.is_array() || pair.size() != 2) {
      fail("bad_sparse_json", "amplitude for " + bits + " must be [re, im]");
    }
    out.entries[bits] = {pair.at(0).get<double>(), pair.at(1).get<double>()};
  }
  out.validate();
  return out;
}

double fidelity(const SparseState& sparse, const Statevector& dense) {
  if (sparse.n != dense.qubits()) {
    fail("bad_argument", "fidelity needs equal qubit counts");
  }
  std::complex<double> overlap = 0.0;
  for (const auto& [bits, amp] : sparse.entries) {
    overlap += std::conj(amp) * dense[parse_bitstring(bits, sparse.n)];
  }
  return std::norm(overlap);
}

}  // namespace reducechop
