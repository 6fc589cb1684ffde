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

#include "reducechop/chopper.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <utility>

#include "reducechop/amplitude_est.hpp"
#include "reducechop/config.hpp"
#include "reducechop/error.hpp"
#include "reducechop/simulator.hpp"
#include "reducechop/statevector.hpp"

namespace reducechop {

namespace {

constexpr int kExactSumMaxQubits = 12;

Statevector basis_state(int n, std::uint64_t index) {
  Statevector state(n);
  state[0] = 0.0;
  state[index] = 1.0;
  return state;
}

// State whose amplitudes are <b|R U2^dag|x>; conjugated entries give the
// second-half factors <x|U2 R^dag|b> of the recombination sum.
Statevector second_half_state(const ChopPlan& plan, std::uint64_t x_index) {
  const Circuit& u2 = plan.pieces().back();
  const Circuit& r = plan.reducers().back();
  return run_circuit(u2.dagger().then(r), basis_state(plan.qubits(), x_index));
}

void require_single_cut(const ChopPlan& plan) {
  if (plan.cuts() != 1) {
    fail("bad_argument", "this recombination handles exactly one cut");
  }
}

void require_exact_sum_size(const ChopPlan& plan) {
  if (plan.qubits() > kExactSumMaxQubits) {
    fail("size_cap", "full intermediate-basis sums are capped at " +
                         std::to_string(kExactSumMaxQubits) + " qubits");
  }
}

}  // namespace

int DepthReport::max_circuit_depth() const {
  int depth = 0;
  for (const auto& stage : stages) depth = std::max(depth, stage.circuit_total());
  return depth;
}

nlohmann::json DepthReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& stage : stages) {
    rows.push_back({{"reducer_in", stage.reducer_in},
                    {"piece", stage.piece},
                    {"reducer_out", stage.reducer_out},
                    {"total", stage.circuit_total()}});
  }
  return {{"qubits", qubits},
          {"stages", std::move(rows)},
          {"max_circuit_depth", max_circuit_depth()},
          {"max_with_ghz_ancilla", max_with_ghz_ancilla()},
          {"max_with_single_ancilla", max_with_single_ancilla()}};
}

ChopPlan::ChopPlan(std::vector<Circuit> pieces, std::vector<Circuit> reducers)
    : pieces_(std::move(pieces)), reducers_(std::move(reducers)) {
  if (pieces_.size() < 2 || reducers_.size() + 1 != pieces_.size()) {
    fail("bad_plan", "need m+1 pieces and m >= 1 reducers");
  }
  const int n = pieces_.front().qubits();
  for (const Circuit& c : pieces_) {
    if (c.qubits() != n) fail("bad_plan", "pieces must share the qubit count");
  }
  for (const Circuit& c : reducers_) {
    if (c.qubits() != n) fail("bad_plan", "reducers must share the qubit count");
  }
}

void ChopPlan::set_reported_depths(std::vector<int> piece_depths,
                                   std::vector<int> reducer_depths) {
  if (piece_depths.size() != pieces_.size() ||
      reducer_depths.size() != reducers_.size()) {
    fail("bad_plan", "depth overrides must match the piece/reducer counts");
  }
  for (int d : piece_depths) {
    if (d < 0) fail("bad_plan", "depths must be non-negative");
  }
  for (int d : reducer_depths) {
    if (d < 0) fail("bad_plan", "depths must be non-negative");
  }
  piece_depths_ = std::move(piece_depths);
  reducer_depths_ = std::move(reducer_depths);
}

DepthReport ChopPlan::depth_report() const {
  std::vector<int> piece_depths = piece_depths_;
  std::vector<int> reducer_depths = reducer_depths_;
  if (piece_depths.empty()) {
    for (const Circuit& c : pieces_) piece_depths.push_back(c.entangling_depth());
  }
  if (reducer_depths.empty() && !reducers_.empty()) {
    for (const Circuit& c : reducers_) reducer_depths.push_back(c.entangling_depth());
  }
  DepthReport report;
  report.qubits = qubits();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    DepthStage stage;
    stage.reducer_in = i > 0 ? reducer_depths[i - 1] : 0;
    stage.piece = piece_depths[i];
    stage.reducer_out = i < reducers_.size() ? reducer_depths[i] : 0;
    report.stages.push_back(stage);
  }
  return report;
}

double chop_probability_exact(const ChopPlan& plan, const std::string& x) {
  require_single_cut(plan);
  require_exact_sum_size(plan);
  const int n = plan.qubits();
  const std::uint64_t x_index = parse_bitstring(x, n);
  const Statevector mid = run_circuit(plan.pieces().front().then(plan.reducers().front()));
  const Statevector second = second_half_state(plan, x_index);
  std::complex<double> sum = 0.0;
  for (std::size_t b = 0; b < mid.dimension(); ++b) {
    sum += std::conj(second[b]) * mid[b];
  }
  return std::norm(sum);
}

double chop_probability(const ChopPlan& plan, const SparseState& reconstructed,
                        const std::string& x) {
  require_single_cut(plan);
  const int n = plan.qubits();
  if (reconstructed.n != n) {
    fail("bad_argument", "reconstructed state width does not match the plan");
  }
  if (reconstructed.entries.empty()) fail("bad_argument", "empty support");
  const std::uint64_t x_index = parse_bitstring(x, n);
  const Statevector second = second_half_state(plan, x_index);
  std::complex<double> sum = 0.0;
  for (const auto& [bits, amp] : reconstructed.entries) {
    sum += std::conj(second[parse_bitstring(bits, n)]) * amp;
  }
  return std::norm(sum);
}

double chop_probability(const ChopPlan& plan, const SparseState& reconstructed,
                        const std::string& x, std::uint64_t second_half_shots,
                        Rng& rng) {
  if (second_half_shots == kExactShots) {
    return chop_probability(plan, reconstructed, x);
  }
  require_single_cut(plan);
  const int n = plan.qubits();
  if (reconstructed.n != n) {
    fail("bad_argument", "reconstructed state width does not match the plan");
  }
  if (reconstructed.entries.empty()) fail("bad_argument", "empty support");

  const std::uint64_t x_index = parse_bitstring(x, n);
  // <x|U2 R^dag|b> = conj(<b|R U2^dag X_x|0>), so the estimator runs on the
  // circuit that prepares |x>, undoes U2, and applies the reducer.
  Circuit prep(n);
  std::vector<Gate> flips;
  for (int q = 0; q < n; ++q) {
    if (qubit_bit(x_index, n, q) == 1) flips.push_back(Gate::x(q));
  }
  if (!flips.empty()) prep.add_layer(std::move(flips));
  const Circuit second_half =
      prep.then(plan.pieces().back().dagger()).then(plan.reducers().back());

  std::complex<double> sum = 0.0;
  std::uint64_t stream = 0;
  for (const auto& [bits, amp] : reconstructed.entries) {
    Rng child = rng.child(stream++);
    const std::complex<double> est =
        hadamard_test_amplitude(second_half, bits, second_half_shots, child);
    sum += std::conj(est) * amp;
  }
  return std::norm(sum);
}

std::vector<double> chop_distribution(const ChopPlan& plan,
                                      const SparseState& reconstructed) {
  require_single_cut(plan);
  require_exact_sum_size(plan);
  if (reconstructed.n != plan.qubits()) {
    fail("bad_argument", "reconstructed state width does not match the plan");
  }
  // Evolving the sparse estimate through R^dag then U2 yields every
  // restricted recombination sum at once.
  const Circuit& u2 = plan.pieces().back();
  const Circuit& r = plan.reducers().back();
  const Statevector out = run_circuit(r.dagger().then(u2), reconstructed.to_statevector());
  std::vector<double> probs(out.dimension());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(out[i]);
  return probs;
}

double multi_cut_probability(const ChopPlan& plan, const std::string& x,
                             std::uint64_t path_cap) {
  const int n = plan.qubits();
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t m = plan.cuts();
  const std::uint64_t x_index = parse_bitstring(x, n);

  double path_count = 1.0;
  for (std::size_t i = 0; i < m; ++i) path_count *= static_cast<double>(dim);
  if (path_count > static_cast<double>(path_cap)) {
    fail("path_cap", "the path sum would exceed the configured cap");
  }

  // Column c of matrix i holds the amplitudes of segment i applied to |c>.
  // Segment 1 is R1 U1, interior segments are R_i U_i R^dag_{i-1}, and the
  // last is U_{m+1} R^dag_m.
  std::vector<std::vector<Statevector>> columns;
  for (std::size_t i = 0; i <= m; ++i) {
    Circuit segment(n);
    if (i > 0) segment = plan.reducers()[i - 1].dagger();
    segment = segment.then(plan.pieces()[i]);
    if (i < m) segment = segment.then(plan.reducers()[i]);
    std::vector<Statevector> cols;
    cols.reserve(dim);
    for (std::uint64_t b = 0; b < dim; ++b) {
      cols.push_back(run_circuit(segment, basis_state(n, b)));
    }
    columns.push_back(std::move(cols));
  }

  // Walk every chain (b_1, ..., b_m) in lexicographic order; the summation
  // order is fixed so results are reproducible bit for bit.
  std::vector<std::uint64_t> chain(m, 0);
  std::complex<double> sum = 0.0;
  while (true) {
    std::complex<double> product = columns[0][0][chain[0]];
    for (std::size_t i = 1; i < m; ++i) {
      product *= columns[i][chain[i - 1]][chain[i]];
    }
    product *= columns[m][chain[m - 1]][x_index];
    sum += product;

    std::size_t digit = m;
    while (digit > 0) {
      --digit;
      if (++chain[digit] < dim) break;
      chain[digit] = 0;
      if (digit == 0) return std::norm(sum);
    }
  }
}

std::vector<std::string> metropolis_sample(
    const std::function<double(const std::string&)>& prob_fn, int n,
    std::size_t steps, std::size_t burn_in,
    const std::optional<std::vector<std::string>>& init_support, Rng& rng) {
  if (n < 1) fail("bad_argument", "qubit count must be positive");
  if (steps <= burn_in) fail("bad_argument", "steps must exceed the burn-in");

  std::vector<std::string> support;
  if (init_support.has_value()) {
    std::set<std::string> seen;
    for (const std::string& bits : *init_support) {
      parse_bitstring(bits, n);
      if (seen.insert(bits).second) support.push_back(bits);
    }
    if (support.empty()) fail("bad_argument", "init support must not be empty");
  }
  const bool mixed = !support.empty();

  auto random_bitstring = [&]() {
    std::string bits(static_cast<std::size_t>(n), '0');
    for (auto& c : bits) c = rng.below(2) ? '1' : '0';
    return bits;
  };

  std::string current;
  double current_prob = 0.0;
  bool started = false;
  for (int attempt = 0; attempt < 100 && !started; ++attempt) {
    current = mixed ? support[rng.below(support.size())] : random_bitstring();
    current_prob = prob_fn(current);
    started = current_prob > 0.0;
  }
  if (!started) {
    fail("cold_start", "no starting point with positive probability in 100 tries");
  }

  const double support_size = static_cast<double>(support.size());
  std::set<std::string> support_set(support.begin(), support.end());
  // Proposal density of the mixture kernel: half uniform-on-support, half
  // single-bit flip. The flip term is symmetric; the support term is not.
  auto proposal_density = [&](const std::string& from, const std::string& to) {
    double q = 0.0;
    if (support_set.count(to)) q += 0.5 / support_size;
    int differing = 0;
    for (int i = 0; i < n && differing < 2; ++i) {
      if (from[i] != to[i]) ++differing;
    }
    if (differing == 1) q += 0.5 / static_cast<double>(n);
    return q;
  };

  std::vector<std::string> samples;
  samples.reserve(steps - burn_in);
  for (std::size_t step = 0; step < steps; ++step) {
    std::string proposal = current;
    if (mixed && rng.below(2) == 0) {
      proposal = support[rng.below(support.size())];
    } else {
      const auto bit = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
      proposal[bit] = proposal[bit] == '0' ? '1' : '0';
    }
    const double proposal_prob = prob_fn(proposal);
    double ratio = 0.0;
    if (proposal_prob > 0.0) {
      if (mixed) {
        ratio = (proposal_prob * proposal_density(proposal, current)) /
                (current_prob * proposal_density(current, proposal));
      } else {
        ratio = proposal_prob / current_prob;  // bit flips are symmetric
      }
    }
    if (ratio >= 1.0 || rng.uniform() < ratio) {
      current = std::move(proposal);
      current_prob = proposal_prob;
    }
    if (step >= burn_in) samples.push_back(current);
  }
  return samples;
}

}  // namespace reducechop
