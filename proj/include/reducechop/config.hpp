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

#ifndef REDUCECHOP_CONFIG_HPP
#define REDUCECHOP_CONFIG_HPP

namespace reducechop {

inline constexpr const char* kVersion = "0.1.0";

// Numeric tolerances shared across the library. Centralized so tests and
// implementation agree on one set of constants.
struct Tolerances {
  double state_norm = 1e-12;       // allowed statevector norm drift
  double unitary = 1e-12;          // gate matrix unitarity check
  double amplitude_floor = 1e-14;  // entries at or below this count as zero
  double eigen_floor = 1e-12;      // covariance eigenvalue floor
  double degenerate_norm = 1e-12;  // interpolated-state norm cutoff
  double sparse_norm = 1e-10;      // sparse-state norm drift after renormalization
  double mass_slack = 1e-12;       // prefix-mass comparisons at exact boundaries
};

inline constexpr Tolerances kTol{};

// Hard cap on simulated qubit count. Defaults to 14; the environment
// variable REDUCECHOP_MAX_QUBITS overrides it (read once per process).
int max_qubits();

}  // namespace reducechop

#endif
