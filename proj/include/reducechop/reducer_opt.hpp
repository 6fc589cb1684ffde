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

#ifndef REDUCECHOP_REDUCER_OPT_HPP
#define REDUCECHOP_REDUCER_OPT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reducechop/cb_rank.hpp"
#include "reducechop/circuit.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/sparse_state.hpp"

namespace reducechop {

// How the first half is turned on during a run: "soft" interpolates the
// state between |0...0> and U1|0...0>, "parametric" enables the first-half
// parameters one at a time (a fraction t of them, in storage order).
enum class ActivationSchedule { kSoft, kParametric };

ActivationSchedule schedule_from_name(const std::string& name);
std::string schedule_name(ActivationSchedule schedule);

using CircuitBuilder = std::function<Circuit(std::span<const double>)>;

// Everything a rank-loss evaluation needs: the first half and its
// parameters, the reducer architecture, and the estimation budget.
struct LossContext {
  ActivationSchedule schedule = ActivationSchedule::kSoft;
  int qubits = 0;
  CircuitBuilder build_u1;
  std::vector<double> phi;
  CircuitBuilder build_reducer;
  std::size_t reducer_params = 0;
  std::uint64_t shots = 0;
  double eps = 0.0;
  double p_m = 0.0;

  void validate() const;
  // The activated first-half state at activation level t in [0, 1].
  Statevector activated_state(double t) const;
};

// Rank-based optimization cost. `value` = K - log(1 - p) diverges as the
// estimate's failure probability approaches 1; when the estimate does not
// certify (estimable false), K is the distinct-outcome fallback and the
// same formula acts as the divergence penalty.
struct LossValue {
  int K = 0;
  double p = 1.0;
  double value = 0.0;
  bool estimable = false;

  static LossValue from_estimate(const CBEstimate& estimate);
};

LossValue loss(std::span<const double> theta, double t, const LossContext& context,
               Rng& rng);

// Evolution-strategy state over the reducer parameters: mean, global step
// size, and a full covariance adapted by cumulative step-size control plus
// rank-1 and rank-mu updates. The covariance is kept symmetric positive
// definite by flooring its eigenvalues; floor hits are counted in repairs().
class EsState {
 public:
  // lambda = 0 picks the dimension default 4 + floor(3 ln d). Requires
  // lambda >= 2 otherwise.
  EsState(std::vector<double> mean, double sigma, int lambda = 0);

  const std::vector<double>& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  int lambda() const { return lambda_; }
  int mu() const { return mu_; }
  std::int64_t generation() const { return generation_; }
  int repairs() const { return repairs_; }
  const std::vector<double>& weights() const { return weights_; }

  // Row-major d x d covariance.
  const std::vector<double>& cov() const { return cov_; }
  double cov_at(int i, int j) const { return cov_[std::size_t(i) * mean_.size() + j]; }

 private:
  friend struct EsStepAccess;

  std::vector<double> mean_;
  double sigma_ = 0.0;
  int lambda_ = 0;
  int mu_ = 0;
  std::int64_t generation_ = 0;
  int repairs_ = 0;
  std::vector<double> cov_;      // row-major d x d
  std::vector<double> p_sigma_;  // step-size path
  std::vector<double> p_cov_;    // covariance path
  std::vector<double> weights_;  // recombination weights, descending, sum 1
  double mu_eff_ = 0.0;
};

struct EsCandidate {
  std::vector<double> theta;
  LossValue loss;
};

struct EsStepResult {
  EsCandidate best;       // best candidate of this generation
  bool repaired = false;  // eigenvalue floor applied to the covariance
};

using LossFn = std::function<LossValue(std::span<const double>, Rng&)>;

// One generation: sample lambda candidates, rank them by (value, K, p),
// recombine the best mu into the new mean, adapt sigma and the covariance.
EsStepResult es_step(EsState& state, const LossFn& loss_fn, Rng& rng);

// One trajectory record per rank estimate, in run order.
struct TrajectoryRow {
  std::string instance_id;
  std::string phase;  // "activate" or "optimize"
  double t = 0.0;
  std::int64_t generation = 0;  // ES generation within the pass; 0 outside
  int K = 0;
  double p = 1.0;
  double loss = 0.0;
  bool estimable = false;

  static std::string csv_header();
  std::string csv_row() const;
};

// Progress of one gradually-activated run: the schedule's position, the
// stopping threshold, and the trajectory gathered so far.
struct ActivationController {
  ActivationSchedule schedule = ActivationSchedule::kSoft;
  double t = 0.0;
  double dt = 0.01;
  int cb_threshold = 0;  // stop-and-optimize rank threshold
  int stall_window = 20;
  double resume_fraction = 0.8;
  std::string instance_id = "0";
  LossContext context;
  std::vector<TrajectoryRow> history;

  // Optimization may stop once the best rank is at or below this; at least
  // 1 so a unit threshold still has a reachable target.
  double resume_threshold() const;
  void validate() const;
};

enum class OptExit { kThreshold, kStall, kBudget };

struct OptimizeOutcome {
  std::vector<double> theta;  // best evaluated candidate (initial mean if none)
  LossValue best;
  OptExit exit = OptExit::kBudget;
  bool failed = false;  // ended with best rank still at or above the threshold
  std::uint64_t evaluations = 0;
  std::int64_t generations = 0;
};

// Run es_step until the best rank reaches the resume threshold, the best
// value stalls for stall_window generations, or the evaluation budget can
// no longer fund a full generation. Appends one row per generation.
OptimizeOutcome optimize_reducer(ActivationController& controller, EsState& es,
                                 std::uint64_t budget, Rng& rng);

struct ActivationProblem {
  LossContext context;
  int cb_threshold = 0;
  double dt = 0.01;
  std::uint64_t optimize_budget = 0;   // loss evaluations per optimization pass
  int periodic_generations = 10;       // parametric: generations per activation
  std::uint64_t amplitude_shots = 0;   // final reconstruction budget
  double sigma0 = 0.0;                 // 0 picks eps as the initial step size
  int stall_window = 20;
  double resume_fraction = 0.8;
  std::string instance_id = "0";

  void validate() const;
};

struct ExperimentRecord {
  std::vector<double> theta_star;
  std::vector<TrajectoryRow> trajectory;
  bool success = false;
  int final_k = 0;
  double final_p = 1.0;
  bool final_estimable = false;
  double fidelity = 0.0;          // reconstructed vs exact, 0 when not certified
  double bound = 0.0;             // certified fidelity lower bound
  double bound_confidence = 0.0;  // 1 - failure probability of the bound
  std::optional<SparseState> reconstructed;
  int optimizer_invocations = 0;
  std::uint64_t loss_evaluations = 0;

  nlohmann::json to_json() const;
};

// The full gradually-activated loop: sweep t per the schedule, optimize on
// threshold breaches (plus the parametric periodic passes), then estimate,
// reconstruct, and certify the final reduced state.
ExperimentRecord run_activation(const ActivationProblem& problem, Rng& rng);

// Protocol defaults: stopping threshold n^3/5 and probability-shot budget
// ceil(eps^-2 n^3 / 4).
int default_cb_threshold(int n);
std::uint64_t default_probability_shots(int n, double eps);

}  // namespace reducechop

#endif
