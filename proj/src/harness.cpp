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

#include "reducechop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "reducechop/amplitude_est.hpp"
#include "reducechop/ansatz.hpp"
#include "reducechop/cb_rank.hpp"
#include "reducechop/circuit.hpp"
#include "reducechop/config.hpp"
#include "reducechop/error.hpp"
#include "reducechop/simulator.hpp"
#include "reducechop/statevector.hpp"

namespace reducechop {

namespace {

constexpr double kBinomialAlpha = 0.01;  // one-sided audit significance

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

template <typename T>
T require_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    fail("bad_config", std::string("config is missing required key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail("bad_config", std::string("config key '") + key + "' has the wrong type: " + e.what());
  }
}

template <typename T>
void optional_field(const nlohmann::json& j, const char* key, T& slot) {
  if (!j.contains(key)) return;
  try {
    slot = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail("bad_config", std::string("config key '") + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

int ExperimentConfig::cut_layers() const {
  const int cut = static_cast<int>(std::floor(double(l_u) * chop_fraction));
  return std::clamp(cut, 1, l_u);
}

std::uint64_t ExperimentConfig::shots() const {
  return probability_shots > 0 ? probability_shots : default_probability_shots(n, eps);
}

int ExperimentConfig::threshold() const {
  return cb_threshold > 0 ? cb_threshold : default_cb_threshold(n);
}

void ExperimentConfig::validate() const {
  if (version != 1) fail("bad_config", "unsupported config version");
  if (n < 1) fail("bad_config", "n must be positive");
  if (n > max_qubits())
    fail("bad_config", "n exceeds the qubit cap (set REDUCECHOP_MAX_QUBITS to raise it)");
  if (l_u < 1) fail("bad_config", "l_u must be positive");
  if (l_r < 1) fail("bad_config", "l_r must be positive");
  if (!(chop_fraction > 0.0) || !(chop_fraction <= 1.0))
    fail("bad_config", "chop_fraction must lie in (0, 1]");
  if (!(eps > 0.0) || !(eps < 1.0)) fail("bad_config", "eps must lie in (0, 1)");
  if (!(p_m > 0.0) || !(p_m < 1.0)) fail("bad_config", "p_m must lie in (0, 1)");
  if (instances < 1) fail("bad_config", "instances must be positive");
  if (optimize_budget < 1) fail("bad_config", "optimize_budget must be positive");
  if (amplitude_shots < 1) fail("bad_config", "amplitude_shots must be positive");
  if (!(dt > 0.0) || !(dt <= 1.0)) fail("bad_config", "dt must lie in (0, 1]");
  if (periodic_generations < 1)
    fail("bad_config", "periodic_generations must be positive");
  if (sigma0 < 0.0) fail("bad_config", "sigma0 must be nonnegative");
  if (!(param_scale > 0.0)) fail("bad_config", "param_scale must be positive");
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"version", version},
                        {"n", n},
                        {"l_u", l_u},
                        {"l_r", l_r},
                        {"chop_fraction", chop_fraction},
                        {"eps", eps},
                        {"p_m", p_m},
                        {"schedule", schedule_name(schedule)},
                        {"instances", instances},
                        {"base_seed", base_seed},
                        {"probability_shots", probability_shots},
                        {"cb_threshold", cb_threshold},
                        {"optimize_budget", optimize_budget},
                        {"amplitude_shots", amplitude_shots},
                        {"dt", dt},
                        {"periodic_generations", periodic_generations},
                        {"sigma0", sigma0},
                        {"param_scale", param_scale}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("bad_config", "config must be a JSON object");
  static const std::vector<std::string> known = {
      "version",          "n",
      "l_u",              "l_r",
      "chop_fraction",    "eps",
      "p_m",              "schedule",
      "instances",        "base_seed",
      "probability_shots", "cb_threshold",
      "optimize_budget",  "amplitude_shots",
      "dt",               "periodic_generations",
      "sigma0",           "param_scale"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      fail("bad_config", "unknown config key '" + item.key() + "'");
  }
  ExperimentConfig cfg;
  cfg.version = require_field<int>(j, "version");
  cfg.n = require_field<int>(j, "n");
  cfg.l_u = require_field<int>(j, "l_u");
  cfg.l_r = require_field<int>(j, "l_r");
  cfg.eps = require_field<double>(j, "eps");
  cfg.instances = require_field<int>(j, "instances");
  cfg.base_seed = require_field<std::uint64_t>(j, "base_seed");
  cfg.optimize_budget = require_field<std::uint64_t>(j, "optimize_budget");
  cfg.amplitude_shots = require_field<std::uint64_t>(j, "amplitude_shots");
  optional_field(j, "chop_fraction", cfg.chop_fraction);
  optional_field(j, "p_m", cfg.p_m);
  if (j.contains("schedule"))
    cfg.schedule = schedule_from_name(require_field<std::string>(j, "schedule"));
  optional_field(j, "probability_shots", cfg.probability_shots);
  optional_field(j, "cb_threshold", cfg.cb_threshold);
  optional_field(j, "dt", cfg.dt);
  optional_field(j, "periodic_generations", cfg.periodic_generations);
  optional_field(j, "sigma0", cfg.sigma0);
  optional_field(j, "param_scale", cfg.param_scale);
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::hash() const { return stable_hash(to_json().dump()); }

std::string stable_hash(const std::string& data) { return hex64(fnv1a64(data)); }

InstanceDraw draw_instance(const ExperimentConfig& config, int instance) {
  if (instance < 0 || instance >= config.instances)
    fail("bad_params", "instance index out of range");
  const Rng root(config.base_seed);
  Rng setup = root.child(2 * std::uint64_t(instance));
  InstanceDraw draw;
  draw.phi_full.resize(TfimAnsatz{config.n, config.l_u}.param_count());
  for (auto& v : draw.phi_full) v = config.param_scale * setup.normal();
  const std::size_t first = TfimAnsatz{config.n, config.cut_layers()}.param_count();
  draw.phi_first.assign(draw.phi_full.begin(), draw.phi_full.begin() + first);
  draw.phi_second.assign(draw.phi_full.begin() + first, draw.phi_full.end());
  return draw;
}

namespace {

ExperimentRecord run_one_instance(const ExperimentConfig& config, int instance) {
  const InstanceDraw draw = draw_instance(config, instance);
  const int n = config.n;
  const int cut = config.cut_layers();
  const int l_r = config.l_r;

  ActivationProblem prob;
  prob.context.schedule = config.schedule;
  prob.context.qubits = n;
  prob.context.build_u1 = [n, cut](std::span<const double> p) {
    return build_tfim(n, cut, p);
  };
  prob.context.phi = draw.phi_first;
  prob.context.build_reducer = [n, l_r](std::span<const double> p) {
    return build_hea(n, l_r, p);
  };
  prob.context.reducer_params = HeaAnsatz{n, l_r}.param_count();
  prob.context.shots = config.shots();
  prob.context.eps = config.eps;
  prob.context.p_m = config.p_m;
  prob.cb_threshold = config.threshold();
  prob.dt = config.dt;
  prob.optimize_budget = config.optimize_budget;
  prob.periodic_generations = config.periodic_generations;
  prob.amplitude_shots = config.amplitude_shots;
  prob.sigma0 = config.sigma0;
  prob.instance_id = std::to_string(instance);

  const Rng root(config.base_seed);
  Rng run = root.child(2 * std::uint64_t(instance) + 1);
  return run_activation(prob, run);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("io", "cannot open for writing: " + path.string());
  out << text;
  if (!out) fail("io", "write failed: " + path.string());
}

}  // namespace

std::map<int, int> BatchRecord::final_k_histogram() const {
  std::map<int, int> hist;
  for (const auto& rec : records)
    if (rec.final_estimable) ++hist[rec.final_k];
  return hist;
}

std::string BatchRecord::trajectory_csv() const {
  std::ostringstream out;
  out << TrajectoryRow::csv_header() << '\n';
  for (const auto& rec : records)
    for (const auto& row : rec.trajectory) out << row.csv_row() << '\n';
  return out.str();
}

std::string BatchRecord::histogram_csv() const {
  std::ostringstream out;
  out << "final_k,count\n";
  for (const auto& [k, count] : final_k_histogram()) out << k << ',' << count << '\n';
  return out.str();
}

nlohmann::json BatchRecord::summary_json() const {
  nlohmann::json instances = nlohmann::json::array();
  int successes = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExperimentRecord& rec = records[i];
    if (rec.success) ++successes;
    instances.push_back({{"id", i},
                         {"success", rec.success},
                         {"final_k", rec.final_k},
                         {"final_p", rec.final_p},
                         {"final_estimable", rec.final_estimable},
                         {"fidelity", rec.fidelity},
                         {"bound", rec.bound},
                         {"bound_confidence", rec.bound_confidence},
                         {"optimizer_invocations", rec.optimizer_invocations},
                         {"loss_evaluations", rec.loss_evaluations},
                         {"trajectory_rows", rec.trajectory.size()}});
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, count] : final_k_histogram()) hist[std::to_string(k)] = count;
  return nlohmann::json{{"artifact_version", kVersion},
                        {"config", config.to_json()},
                        {"config_hash", config_hash},
                        {"base_seed", config.base_seed},
                        {"instances", instances},
                        {"successes", successes},
                        {"final_k_histogram", hist},
                        {"wall_seconds", wall_seconds}};
}

BatchRecord run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                           int workers) {
  config.validate();
  const std::uint64_t floor = min_shots(config.eps, config.p_m);
  if (config.shots() < floor) {
    fail("budget_gate",
         "probability-shot budget " + std::to_string(config.shots()) +
             " cannot certify eps=" + std::to_string(config.eps) +
             " at p_m=" + std::to_string(config.p_m) + "; the minimum M is " +
             std::to_string(floor));
  }

  BatchRecord batch;
  batch.config = config;
  batch.config_hash = config.hash();
  batch.records.resize(std::size_t(config.instances));

  int pool = workers;
  if (pool <= 0) pool = std::max(1u, std::thread::hardware_concurrency());
  pool = std::min(pool, config.instances);

  const auto start = std::chrono::steady_clock::now();
  if (pool <= 1) {
    for (int i = 0; i < config.instances; ++i)
      batch.records[std::size_t(i)] = run_one_instance(config, i);
  } else {
    std::atomic<int> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(std::size_t(pool));
    for (int w = 0; w < pool; ++w) {
      threads.emplace_back([&] {
        for (;;) {
          const int i = cursor.fetch_add(1);
          if (i >= config.instances) return;
          try {
            batch.records[std::size_t(i)] = run_one_instance(config, i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  batch.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail("io", "cannot create output directory " + out_dir + ": " + ec.message());
    write_text_file(std::filesystem::path(out_dir) / "trajectory.csv",
                    batch.trajectory_csv());
    write_text_file(std::filesystem::path(out_dir) / "histogram.csv",
                    batch.histogram_csv());
    write_text_file(std::filesystem::path(out_dir) / "summary.json",
                    batch.summary_json().dump(2) + "\n");
  }
  return batch;
}

BoundCheck bound_check_from_name(const std::string& name) {
  // The shorthand aliases keep older run scripts working.
  if (name == "rank-certificate" || name == "lemma2") return BoundCheck::kRankCertificate;
  if (name == "fidelity-floor" || name == "lemma3") return BoundCheck::kFidelityFloor;
  fail("bad_argument", "unknown bound check: " + name);
}

std::string bound_check_name(BoundCheck which) {
  return which == BoundCheck::kRankCertificate ? "rank-certificate" : "fidelity-floor";
}

void VerifyConfig::validate() const {
  if (trials < 100) fail("bad_params", "bound audits need at least 100 trials");
  if (n < 1) fail("bad_params", "n must be positive");
  if (n > max_qubits())
    fail("bad_params", "n exceeds the qubit cap (set REDUCECHOP_MAX_QUBITS to raise it)");
  if (family != "point" && family != "ghz" && family != "tfim")
    fail("bad_params", "family must be point, ghz, or tfim");
  if (layers < 1) fail("bad_params", "layers must be positive");
  if (!(param_scale > 0.0)) fail("bad_params", "param_scale must be positive");
  if (!(eps > 0.0) || !(eps < 1.0)) fail("bad_params", "eps must lie in (0, 1)");
  if (!(p_m > 0.0) || !(p_m < 1.0)) fail("bad_params", "p_m must lie in (0, 1)");
  if (amplitude_shots < 1) fail("bad_params", "amplitude_shots must be positive");
}

double binomial_upper_tail(int trials, double rate, int count) {
  if (count <= 0) return 1.0;
  if (count > trials) return 0.0;
  if (rate <= 0.0) return 0.0;
  if (rate >= 1.0) return 1.0;
  double tail = 0.0;
  const double log_q = std::log(rate);
  const double log_1mq = std::log1p(-rate);
  for (int k = count; k <= trials; ++k) {
    const double log_choose = std::lgamma(double(trials) + 1.0) -
                              std::lgamma(double(k) + 1.0) -
                              std::lgamma(double(trials - k) + 1.0);
    tail += std::exp(log_choose + k * log_q + (trials - k) * log_1mq);
  }
  return std::min(tail, 1.0);
}

nlohmann::json VerifyReport::to_json() const {
  return nlohmann::json{{"which", bound_check_name(which)},
                        {"trials", trials},
                        {"certified", certified},
                        {"violations", violations},
                        {"empirical_rate", empirical_rate},
                        {"analytic_bound", analytic_bound},
                        {"tail_probability", tail_probability},
                        {"pass", pass}};
}

VerifyReport verify_bounds(const VerifyConfig& config) {
  config.validate();
  const std::uint64_t shots =
      config.probability_shots > 0 ? config.probability_shots
                                   : default_probability_shots(config.n, config.eps);
  const std::uint64_t floor = min_shots(config.eps, config.p_m);
  if (shots < floor)
    fail("budget_gate", "probability-shot budget " + std::to_string(shots) +
                            " cannot certify; the minimum M is " + std::to_string(floor));

  const Rng root(config.seed);
  VerifyReport report;
  report.which = config.which;
  report.trials = config.trials;

  for (int trial = 0; trial < config.trials; ++trial) {
    Rng setup = root.child(2 * std::uint64_t(trial));
    Rng sampler = root.child(2 * std::uint64_t(trial) + 1);

    Circuit circuit(config.n);
    if (config.family == "ghz") {
      circuit = ghz_circuit(config.n);
    } else if (config.family == "tfim") {
      std::vector<double> phi(TfimAnsatz{config.n, config.layers}.param_count());
      for (auto& v : phi) v = config.param_scale * setup.normal();
      circuit = build_tfim(config.n, config.layers, phi);
    }
    const Statevector state = run_circuit(circuit);

    const CBEstimate est = estimate_cb_rank(ShotSource::from_state(state), shots,
                                            config.eps, config.p_m, sampler);
    if (!est.F) continue;  // no certificate issued, nothing to audit
    ++report.certified;

    if (config.which == BoundCheck::kRankCertificate) {
      // Claim: the accepted prefix carries at least 1-eps of the true mass,
      // failing with probability at most est.p.
      double mass = 0.0;
      for (int i = 0; i < est.K; ++i)
        mass += probability(state, parse_bitstring(est.support[std::size_t(i)].bits,
                                                   config.n));
      if (mass < 1.0 - config.eps - kTol.mass_slack) ++report.violations;
      report.analytic_bound = std::max(report.analytic_bound, est.p);
    } else {
      // Claim: the reconstruction's true fidelity clears the certified
      // floor, failing with probability at most the acceptance bound.
      const auto amps =
          estimate_support_amplitudes(circuit, est, config.amplitude_shots, sampler);
      const SparseState recon = reconstruct_state(est, amps);
      const double fid = fidelity(recon, state);
      const double bound =
          fidelity_lower_bound(config.eps, est.K, config.amplitude_shots, est.m, est.M);
      if (fid < bound - 1e-12) ++report.violations;
      report.analytic_bound =
          std::max(report.analytic_bound, hoeffding_bound(est.M, config.eps, est.m));
    }
  }

  report.empirical_rate =
      report.certified > 0 ? double(report.violations) / double(report.certified) : 0.0;
  report.tail_probability =
      binomial_upper_tail(report.certified, report.analytic_bound, report.violations);
  report.pass = report.tail_probability >= kBinomialAlpha;
  return report;
}

}  // namespace reducechop
