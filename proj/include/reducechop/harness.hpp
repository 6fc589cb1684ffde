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

#ifndef REDUCECHOP_HARNESS_HPP
#define REDUCECHOP_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "reducechop/reducer_opt.hpp"

namespace reducechop {

// One batch configuration: a TFIM block of l_u layers chopped into a first
// stage of cut_layers() and a remainder, a HEA reducer of l_r layers, and
// the estimation protocol knobs. Loaded from versioned JSON; unknown keys
// are rejected so hyperparameter typos fail fast.
struct ExperimentConfig {
  int version = 1;
  int n = 0;
  int l_u = 0;
  int l_r = 0;
  double chop_fraction = 0.5;
  double eps = 0.0;
  double p_m = 1e-4;
  ActivationSchedule schedule = ActivationSchedule::kSoft;
  int instances = 0;
  std::uint64_t base_seed = 1;
  std::uint64_t probability_shots = 0;  // 0 resolves to ceil(eps^-2 n^3 / 4)
  int cb_threshold = 0;                 // 0 resolves to floor(n^3 / 5)
  std::uint64_t optimize_budget = 0;
  std::uint64_t amplitude_shots = 0;
  double dt = 0.01;
  int periodic_generations = 10;
  double sigma0 = 0.0;  // 0 picks eps
  double param_scale = 0.8;

  // Layers assigned to the first stage: floor(l_u * chop_fraction), at
  // least one. The remainder (possibly empty) forms the second stage.
  int cut_layers() const;
  std::uint64_t shots() const;  // resolved probability-shot budget
  int threshold() const;        // resolved stopping threshold

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  // FNV-1a 64 of the canonical serialization, as 16 hex digits.
  std::string hash() const;
};

// First-stage parameters for one instance, drawn from the batch seed. The
// full block's parameters are layer-major, so the first-stage slice is a
// prefix and build order matches the unchopped circuit exactly.
struct InstanceDraw {
  std::vector<double> phi_full;   // all l_u layers
  std::vector<double> phi_first;  // first cut_layers() layers
  std::vector<double> phi_second;
};
InstanceDraw draw_instance(const ExperimentConfig& config, int instance);

// Everything run_experiment produced: per-instance records in instance
// order plus the serialization helpers that back the output files.
struct BatchRecord {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<ExperimentRecord> records;
  double wall_seconds = 0.0;

  std::map<int, int> final_k_histogram() const;  // over estimable finals
  std::string trajectory_csv() const;
  std::string histogram_csv() const;
  nlohmann::json summary_json() const;
};

// Runs the configured instances (worker threads when workers > 1; 0 picks
// the hardware concurrency) and writes trajectory.csv, histogram.csv, and
// summary.json under out_dir. Empty out_dir skips the file outputs. The
// CSV bytes depend only on (config, base_seed).
BatchRecord run_experiment(const ExperimentConfig& config,
                           const std::string& out_dir, int workers = 0);

// Which certified inequality a Monte Carlo audit exercises: the rank
// certificate (accepted estimates cover 1-eps of the true mass) or the
// reconstruction fidelity floor.
enum class BoundCheck { kRankCertificate, kFidelityFloor };

BoundCheck bound_check_from_name(const std::string& name);
std::string bound_check_name(BoundCheck which);

struct VerifyConfig {
  BoundCheck which = BoundCheck::kRankCertificate;
  int trials = 0;  // at least 100
  int n = 6;
  // State family per trial: "point" (|0..0>), "ghz", or "tfim" (fresh
  // random parameters each trial).
  std::string family = "tfim";
  int layers = 3;
  double param_scale = 0.8;
  double eps = 0.05;
  double p_m = 1e-4;
  std::uint64_t probability_shots = 0;  // 0 resolves to the protocol budget
  std::uint64_t amplitude_shots = 4096;
  std::uint64_t seed = 1;

  void validate() const;
};

struct VerifyReport {
  BoundCheck which = BoundCheck::kRankCertificate;
  int trials = 0;
  int certified = 0;   // trials that produced a certificate to check
  int violations = 0;  // certified trials whose guarantee failed
  double empirical_rate = 0.0;
  double analytic_bound = 0.0;  // largest per-trial failure probability
  // One-sided binomial tail P(Binom(certified, analytic) >= violations);
  // the audit passes unless that tail drops below 0.01.
  double tail_probability = 1.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

VerifyReport verify_bounds(const VerifyConfig& config);

// P(Binom(trials, rate) >= count), exact summation.
double binomial_upper_tail(int trials, double rate, int count);

// FNV-1a 64 of `data` as 16 hex digits; stamps CLI outputs so reruns can be
// matched to their exact inputs.
std::string stable_hash(const std::string& data);

}  // namespace reducechop

#endif
