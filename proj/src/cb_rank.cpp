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

#include "reducechop/cb_rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

#include "reducechop/config.hpp"
#include "reducechop/error.hpp"

namespace reducechop {

namespace {

// Width of a power-of-two outcome table, i.e. the qubit count it indexes.
int bit_width_of(std::size_t dimension) {
  if (dimension < 2) fail("bad_distribution", "outcome table needs at least 2 entries");
  int n = 0;
  std::size_t d = dimension;
  while (d > 1) {
    if (d & 1) fail("bad_distribution", "outcome count must be a power of two");
    d >>= 1;
    ++n;
  }
  return n;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

nlohmann::json CBEstimate::to_json() const {
  nlohmann::json obj;
  obj["K"] = K;
  obj["p"] = p;
  obj["F"] = F;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& entry : support) {
    rows.push_back({{"x", entry.bits},
                    {"n", entry.first_count},
                    {"m", entry.second_count}});
  }
  obj["support"] = std::move(rows);
  obj["m"] = m;
  obj["M"] = M;
  obj["diagnostic"] = diagnostic;
  return obj;
}

CBEstimate CBEstimate::from_json(const nlohmann::json& j) {
  for (const char* key : {"K", "p", "F", "support", "m", "M", "diagnostic"}) {
    if (!j.contains(key)) {
      fail("bad_estimate_json", std::string("missing field ") + key);
    }
  }
  CBEstimate out;
  out.K = j.at("K").get<int>();
  out.p = j.at("p").get<double>();
  out.F = j.at("F").get<bool>();
  for (const auto& row : j.at("support")) {
    out.support.push_back({row.at("x").get<std::string>(),
                           row.at("n").get<std::uint32_t>(),
                           row.at("m").get<std::uint32_t>()});
  }
  out.m = j.at("m").get<std::uint64_t>();
  out.M = j.at("M").get<std::uint64_t>();
  out.diagnostic = j.at("diagnostic").get<std::string>();
  return out;
}

const char* CBEstimate::csv_header() { return "K,p,F,m,M"; }

std::string CBEstimate::csv_row() const {
  std::ostringstream row;
  row << K << ',' << format_double(p) << ',' << (F ? 1 : 0) << ',' << m << ',' << M;
  return row.str();
}

int exact_cb_rank(const Statevector& state, double eps) {
  if (!(eps >= 0.0) || eps >= 1.0) {
    fail("bad_argument", "eps must lie in [0, 1)");
  }
  if (eps == 0.0) {
    int count = 0;
    for (const auto& amp : state.amplitudes()) {
      if (std::abs(amp) > kTol.amplitude_floor) ++count;
    }
    return count;
  }
  std::vector<double> probs(state.dimension());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(state[i]);
  std::sort(probs.begin(), probs.end(), std::greater<double>());
  // The slack keeps exact-integer boundaries (uniform states) from tipping
  // one rank too high when the float prefix sum lands a hair under target.
  const double target = 1.0 - eps - kTol.mass_slack;
  double mass = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    mass += probs[k];
    if (mass >= target) return static_cast<int>(k + 1);
  }
  return static_cast<int>(probs.size());
}

SparseState best_rank_k_approx(const Statevector& state, int K) {
  const auto dim = state.dimension();
  if (K < 1 || static_cast<std::size_t>(K) > dim) {
    fail("bad_argument", "K must lie in [1, 2^n]");
  }
  std::vector<std::uint64_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    const double pa = std::norm(state[a]);
    const double pb = std::norm(state[b]);
    if (pa != pb) return pa > pb;
    return a < b;
  });

  double kept_mass = 0.0;
  for (int k = 0; k < K; ++k) kept_mass += std::norm(state[order[k]]);
  if (!(kept_mass > 0.0)) fail("degenerate_state", "top-K mass is zero");

  SparseState out;
  out.n = state.qubits();
  out.renorm_factor = 1.0 / std::sqrt(kept_mass);
  for (int k = 0; k < K; ++k) {
    const std::uint64_t idx = order[k];
    out.entries[to_bitstring(idx, out.n)] = state[idx] * out.renorm_factor;
  }
  out.validate();
  return out;
}

double hoeffding_bound(std::uint64_t M, double eps, double m) {
  if (M < 1) fail("bad_argument", "M must be positive");
  if (m < 0.0 || m >= eps * static_cast<double>(M)) {
    fail("bad_argument", "residual m must satisfy 0 <= m < M*eps");
  }
  const double gap = eps - m / static_cast<double>(M);
  return std::exp(-2.0 * static_cast<double>(M) * gap * gap);
}

std::uint64_t min_shots(double eps, double p_m) {
  if (!(eps > 0.0) || eps >= 1.0) fail("bad_argument", "eps must lie in (0, 1)");
  if (!(p_m > 0.0) || p_m >= 1.0) fail("bad_argument", "p_m must lie in (0, 1)");
  const double threshold = std::log(1.0 / p_m) / (2.0 * eps * eps);
  auto M = static_cast<std::uint64_t>(std::floor(threshold)) + 1;
  while (std::exp(-2.0 * static_cast<double>(M) * eps * eps) >= p_m) ++M;
  return M;
}

CBEstimate estimate_cb_rank(const ShotSource& sampler, std::uint64_t M, double eps,
                            double p_m, Rng& rng) {
  if (M < 1) fail("bad_argument", "M must be positive");
  if (!(eps > 0.0) || eps >= 1.0) {
    fail("bad_argument", "eps must lie in (0, 1) for estimation");
  }
  if (!(p_m > 0.0) || p_m >= 1.0) fail("bad_argument", "p_m must lie in (0, 1)");
  const int n = bit_width_of(sampler.dimension());

  CBEstimate out;
  out.M = M;

  // Best case is zero residual; when even that bound misses p_m no prefix can
  // be accepted, so record why and let the scan document the failure.
  const double best_case = std::exp(-2.0 * static_cast<double>(M) * eps * eps);
  if (best_case >= p_m) {
    std::ostringstream msg;
    msg << "shot budget too small: best-case bound exp(-2*M*eps^2) = "
        << best_case << " >= p_m = " << p_m << "; need M >= "
        << min_shots(eps, p_m);
    out.diagnostic = msg.str();
  }

  std::vector<std::uint32_t> first_counts;
  std::vector<std::uint32_t> second_counts;
  sampler.draw_counts(M, rng, first_counts);
  sampler.draw_counts(M, rng, second_counts);

  std::vector<std::uint64_t> order;
  for (std::uint64_t i = 0; i < first_counts.size(); ++i) {
    if (first_counts[i] > 0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (first_counts[a] != first_counts[b]) return first_counts[a] > first_counts[b];
    return a < b;  // index order matches bitstring lexicographic order
  });

  // Walk the prefix, shrinking the residual by each retained second-set
  // count; second-set outcomes never seen in the first set stay in m forever.
  std::uint64_t residual = M;
  double p = 1.0;
  bool accepted = false;
  std::size_t prefix = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    residual -= second_counts[order[k]];
    if (static_cast<double>(residual) < eps * static_cast<double>(M)) {
      p = hoeffding_bound(M, eps, static_cast<double>(residual));
      if (p < p_m) {
        accepted = true;
        prefix = k + 1;
        break;
      }
    }
  }

  out.K = static_cast<int>(accepted ? prefix : order.size());
  out.p = p;
  out.F = accepted;
  out.m = residual;
  out.support.reserve(order.size());
  for (std::uint64_t idx : order) {
    out.support.push_back(
        {to_bitstring(idx, n), first_counts[idx], second_counts[idx]});
  }
  return out;
}

}  // namespace reducechop
