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

#ifndef REDUCECHOP_CB_RANK_HPP
#define REDUCECHOP_CB_RANK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "reducechop/rng.hpp"
#include "reducechop/simulator.hpp"
#include "reducechop/sparse_state.hpp"
#include "reducechop/statevector.hpp"

namespace reducechop {

// One distinct first-set outcome with its counts in both sample sets.
struct SupportEntry {
  std::string bits;
  std::uint32_t first_count = 0;
  std::uint32_t second_count = 0;
};

// Result of the two-sample rank scan. `support` lists every distinct
// first-set outcome, sorted by first-set count descending, ties broken by
// bitstring ascending; `K` is the accepted prefix length (or the distinct
// count when not estimable), `m` the residual second-set count outside that
// prefix, and `p` the bound on the probability that the true rank exceeds K.
struct CBEstimate {
  int K = 0;
  double p = 1.0;
  bool F = false;
  std::vector<SupportEntry> support;
  std::uint64_t m = 0;
  std::uint64_t M = 0;
  // Set when the shot budget cannot certify any rank at this eps/p_m.
  std::string diagnostic;

  nlohmann::json to_json() const;
  static CBEstimate from_json(const nlohmann::json& j);

  // Trajectory row "K,p,F,m,M" with p at full precision and F as 0/1.
  static const char* csv_header();
  std::string csv_row() const;
};

// Smallest K whose top-K probability mass reaches 1-eps. eps = 0 counts the
// amplitudes above the shared floor instead.
int exact_cb_rank(const Statevector& state, double eps);

// Keeps the K largest-probability entries (ties by bitstring ascending) and
// renormalizes. The squared overlap with the input equals the kept mass.
SparseState best_rank_k_approx(const Statevector& state, int K);

// Two-sample frequency scan with the Hoeffding acceptance rule. When the
// budget cannot reach p_m even at zero residual the scan still runs (it
// provably cannot accept) and the estimate carries a diagnostic.
CBEstimate estimate_cb_rank(const ShotSource& sampler, std::uint64_t M, double eps,
                            double p_m, Rng& rng);

// exp(-2M(eps - m/M)^2), the chance that a scan accepting at residual m
// underestimated the true rank. Requires m < M*eps.
double hoeffding_bound(std::uint64_t M, double eps, double m);

// Smallest M whose zero-residual bound exp(-2M eps^2) gets below p_m.
std::uint64_t min_shots(double eps, double p_m);

}  // namespace reducechop

#endif
