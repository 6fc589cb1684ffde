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

#ifndef REDUCECHOP_SPARSE_STATE_HPP
#define REDUCECHOP_SPARSE_STATE_HPP

#include <complex>
#include <map>
#include <string>

#include <json.hpp>

#include "reducechop/statevector.hpp"

namespace reducechop {

// Unit-norm state supported on a few computational-basis entries. Keys are
// bitstrings (qubit 0 first); the ordered map keeps serialization and
// iteration deterministic.
struct SparseState {
  int n = 0;
  std::map<std::string, std::complex<double>> entries;
  // Multiplicative factor applied to the raw amplitudes to reach unit norm.
  double renorm_factor = 1.0;

  std::size_t rank() const { return entries.size(); }
  double norm() const;
  // Key width/charset and unit norm; raise on violation.
  void validate() const;
  // Dense embedding with zeros off the support.
  Statevector to_statevector() const;

  nlohmann::json to_json() const;
  static SparseState from_json(const nlohmann::json& j);
};

// Squared overlap |<sparse|dense>|^2; only support entries contribute.
double fidelity(const SparseState& sparse, const Statevector& dense);

}  // namespace reducechop

#endif
