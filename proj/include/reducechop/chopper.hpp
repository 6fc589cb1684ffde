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

#ifndef REDUCECHOP_CHOPPER_HPP
#define REDUCECHOP_CHOPPER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reducechop/circuit.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/sparse_state.hpp"

namespace reducechop {

// Entangling-depth budget of one hardware run: the inverse reducer carried
// in from the previous cut, the piece itself, and the reducer applied before
// measuring. Measurement overhead is reported separately because its cost
// depends on the ancilla scheme.
struct DepthStage {
  int reducer_in = 0;
  int piece = 0;
  int reducer_out = 0;

  int circuit_total() const { return reducer_in + piece + reducer_out; }
};

struct DepthReport {
  int qubits = 0;
  std::vector<DepthStage> stages;

  // Deepest single run, without measurement overhead.
  int max_circuit_depth() const;
  // One extra layer when an entangled ancilla register absorbs the readout.
  int max_with_ghz_ancilla() const { return max_circuit_depth() + 1; }
  // One reused ancilla costs a layer per data qubit instead.
  int max_with_single_ancilla() const { return max_circuit_depth() + qubits; }

  nlohmann::json to_json() const;
};

// A circuit split into pieces U_1..U_{m+1} with reducers R_1..R_m at the m
// cut points. The composite action equals U_{m+1}...U_1 because each reducer
// is undone by its inverse in the next stage.
class ChopPlan {
 public:
  ChopPlan(std::vector<Circuit> pieces, std::vector<Circuit> reducers);

  // Replaces the structural entangling depths in the report with externally
  // accounted ones (ansatz-level gate counting).
  void set_reported_depths(std::vector<int> piece_depths,
                           std::vector<int> reducer_depths);

  int qubits() const { return pieces_.front().qubits(); }
  std::size_t cuts() const { return reducers_.size(); }
  const std::vector<Circuit>& pieces() const { return pieces_; }
  const std::vector<Circuit>& reducers() const { return reducers_; }

  DepthReport depth_report() const;

 private:
  std::vector<Circuit> pieces_;
  std::vector<Circuit> reducers_;
  std::vector<int> piece_depths_;
  std::vector<int> reducer_depths_;
};

// Output probability of a single-cut plan via the full intermediate-basis
// sum; equals direct simulation by the resolution of the identity.
double chop_probability_exact(const ChopPlan& plan, const std::string& x);

// Same sum restricted to the reconstructed support. Second-half amplitudes
// come from the simulator; the overload with a shot count estimates them
// with the same interference test used for the first half.
double chop_probability(const ChopPlan& plan, const SparseState& reconstructed,
                        const std::string& x);
double chop_probability(const ChopPlan& plan, const SparseState& reconstructed,
                        const std::string& x, std::uint64_t second_half_shots,
                        Rng& rng);

// Probabilities of every output bitstring (index order) in one pass.
std::vector<double> chop_distribution(const ChopPlan& plan,
                                      const SparseState& reconstructed);

inline constexpr std::uint64_t kDefaultPathCap = std::uint64_t{1} << 20;

// Literal sum over every chain of intermediate outcomes b_1..b_m. Exact
// amplitudes only; the number of paths (2^n)^m must stay within the cap.
double multi_cut_probability(const ChopPlan& plan, const std::string& x,
                             std::uint64_t path_cap = kDefaultPathCap);

// Metropolis chain over bitstrings targeting prob_fn. Proposals flip one
// uniformly chosen bit; when init_support is given the chain starts there
// and proposals mix in uniform draws from that set (with the matching
// acceptance correction), which keeps disconnected supports reachable.
std::vector<std::string> metropolis_sample(
    const std::function<double(const std::string&)>& prob_fn, int n,
    std::size_t steps, std::size_t burn_in,
    const std::optional<std::vector<std::string>>& init_support, Rng& rng);

}  // namespace reducechop

#endif
