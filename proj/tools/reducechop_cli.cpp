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

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reducechop/amplitude_est.hpp"
#include "reducechop/cb_rank.hpp"
#include "reducechop/chopper.hpp"
#include "reducechop/circuit.hpp"
#include "reducechop/config.hpp"
#include "reducechop/error.hpp"
#include "reducechop/harness.hpp"
#include "reducechop/rng.hpp"
#include "reducechop/simulator.hpp"
#include "reducechop/sparse_state.hpp"
#include "reducechop/statevector.hpp"

namespace {

using nlohmann::json;
using namespace reducechop;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io", "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    // e.what() carries the byte offset of the syntax error.
    fail("bad_json", path + ": " + e.what());
  }
}

void emit_result(const json& result, const std::string& out_file) {
  const std::string text = result.dump(2) + "\n";
  std::cout << text;
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!out) fail("io", "cannot open for writing: " + out_file);
    out << text;
  }
}

// Dense state from a circuit ("layers"), a sparse state ("entries"), or an
// explicit amplitude list ("amplitudes" with "n").
Statevector load_state_file(const std::string& path) {
  const json j = load_json_file(path);
  if (j.contains("layers")) return run_circuit(Circuit::from_json(j));
  if (j.contains("entries")) return SparseState::from_json(j).to_statevector();
  if (j.contains("amplitudes")) {
    if (!j.contains("n")) fail("bad_json", path + ": dense state needs field 'n'");
    const int n = j.at("n").get<int>();
    std::vector<std::complex<double>> amps;
    for (const auto& pair : j.at("amplitudes")) {
      if (!pair.is_array() || pair.size() != 2)
        fail("bad_json", path + ": each amplitude must be a [re, im] pair");
      amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return Statevector(n, std::move(amps));
  }
  fail("bad_json", path +
                       ": expected a circuit ('layers'), a sparse state ('entries'), "
                       "or a dense state ('amplitudes')");
}

std::vector<std::string> parse_bitstring_list(const std::string& list, int n) {
  if (list == "all") {
    if (n > 12)
      fail("bad_argument",
           "'all' enumerates 2^n outputs and is capped at n = 12; pass an explicit list");
    std::vector<std::string> xs;
    xs.reserve(std::size_t(1) << n);
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << n); ++i)
      xs.push_back(to_bitstring(i, n));
    return xs;
  }
  std::vector<std::string> xs;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string item = list.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) fail("bad_argument", "empty bitstring in --x list");
    parse_bitstring(item, n);  // validates width and charset
    xs.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (xs.empty()) fail("bad_argument", "--x needs at least one bitstring");
  return xs;
}

json stamped(const json& args, std::uint64_t seed) {
  return json{{"artifact_version", kVersion},
              {"seed", seed},
              {"args", args},
              {"args_hash", stable_hash(args.dump())}};
}

struct ChopArgs {
  std::string circuit_file;
  int cut = -1;
  std::string reducer = "identity";
  std::string state_file;
  std::string x_list = "all";
  std::uint64_t shots = 0;
  double eps = 0.08;
  double p_m = 1e-4;
  std::uint64_t phi_shots = 8192;
  std::uint64_t second_half_shots = 0;
  bool exact = false;
  std::uint64_t seed = 1;
  std::string out_file;
};

void run_chop(const ChopArgs& a) {
  const json circuit_json = load_json_file(a.circuit_file);
  const Circuit full = Circuit::from_json(circuit_json);
  const int n = full.qubits();
  if (a.cut < 0 || std::size_t(a.cut) > full.layer_count())
    fail("bad_argument", "--cut must lie in [0, " +
                             std::to_string(full.layer_count()) + "] for this circuit");
  const Circuit u1 = full.slice(0, std::size_t(a.cut));
  const Circuit u2 = full.slice(std::size_t(a.cut), full.layer_count());
  Circuit reducer(n);
  if (a.reducer != "identity") {
    reducer = Circuit::from_json(load_json_file(a.reducer));
    if (reducer.qubits() != n)
      fail("bad_argument", "reducer acts on a different register than the circuit");
  }
  const ChopPlan plan({u1, u2}, {reducer});
  const std::vector<std::string> xs = parse_bitstring_list(a.x_list, n);
  const std::uint64_t shots =
      a.shots > 0 ? a.shots : default_probability_shots(n, a.eps);

  json args{{"circuit", a.circuit_file}, {"cut", a.cut},
            {"reducer", a.reducer},      {"state", a.state_file},
            {"x", a.x_list},             {"M", shots},
            {"eps", a.eps},              {"p_m", a.p_m},
            {"phi_shots", a.phi_shots},  {"second_half_shots", a.second_half_shots},
            {"exact", a.exact}};
  json result = stamped(args, a.seed);
  result["n"] = n;
  result["cut"] = a.cut;
  result["depth_report"] = plan.depth_report().to_json();

  Rng rng(a.seed);
  json probabilities = json::object();

  if (a.exact) {
    result["mode"] = "exact-sum";
    for (const auto& x : xs) probabilities[x] = chop_probability_exact(plan, x);
  } else if (!a.state_file.empty()) {
    result["mode"] = "sparse-file";
    const SparseState given = SparseState::from_json(load_json_file(a.state_file));
    for (const auto& x : xs) {
      probabilities[x] =
          a.second_half_shots > 0
              ? chop_probability(plan, given, x, a.second_half_shots, rng)
              : chop_probability(plan, given, x);
    }
  } else {
    result["mode"] = "pipeline";
    const Circuit first_half = u1.then(reducer);
    const Statevector mid = run_circuit(first_half);
    const CBEstimate est =
        estimate_cb_rank(ShotSource::from_state(mid), shots, a.eps, a.p_m, rng);
    result["estimate"] = est.to_json();
    if (!est.F) {
      result["estimable"] = false;
      result["probabilities"] = json::object();
      emit_result(result, a.out_file);
      return;
    }
    result["estimable"] = true;
    const auto amps = estimate_support_amplitudes(first_half, est, a.phi_shots, rng);
    const SparseState recon = reconstruct_state(est, amps);
    const double floor =
        fidelity_lower_bound(a.eps, est.K, a.phi_shots, est.m, est.M);
    result["bound"] = json{{"fidelity_floor", floor},
                           {"confidence", 1.0 - hoeffding_bound(est.M, a.eps, est.m)},
                           {"l1_ceiling", 2.0 * std::sqrt(std::max(0.0, 1.0 - floor))}};
    for (const auto& x : xs) {
      probabilities[x] =
          a.second_half_shots > 0
              ? chop_probability(plan, recon, x, a.second_half_shots, rng)
              : chop_probability(plan, recon, x);
    }
  }
  result["probabilities"] = probabilities;

  if (n <= 10) {
    const Statevector direct = run_circuit(u1.then(u2));
    json exact = json::object();
    double l1 = 0.0;
    for (const auto& x : xs) {
      const double p = probability(direct, parse_bitstring(x, n));
      exact[x] = p;
      l1 += std::abs(probabilities.at(x).get<double>() - p);
    }
    result["exact"] = exact;
    result["l1_requested"] = l1;
  }
  emit_result(result, a.out_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduce-and-chop simulation toolkit"};
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json,
               "report failures as machine-readable JSON on stderr");

  // run-experiment
  auto* run_cmd = app.add_subcommand(
      "run-experiment", "run a seeded batch and write trajectory/histogram/summary files");
  std::string config_path, run_out_dir;
  int workers = 0;
  int instances_override = 0;
  std::uint64_t seed_override = 0;
  run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  run_cmd->add_option("--out", run_out_dir, "output directory")->required();
  run_cmd->add_option("--workers", workers, "worker threads (0 = logical cores)");
  auto* inst_opt = run_cmd->add_option("--instances", instances_override,
                                       "override the configured instance count");
  auto* seed_opt =
      run_cmd->add_option("--seed", seed_override, "override the configured base seed");
  run_cmd->callback([&] {
    ExperimentConfig config = ExperimentConfig::from_json(load_json_file(config_path));
    if (inst_opt->count() > 0) config.instances = instances_override;
    if (seed_opt->count() > 0) config.base_seed = seed_override;
    config.validate();
    const BatchRecord batch = run_experiment(config, run_out_dir, workers);
    std::cout << batch.summary_json().dump(2) << "\n";
  });

  // estimate-cb
  auto* est_cmd =
      app.add_subcommand("estimate-cb", "measurement-based rank estimate of a state");
  std::string est_state_file, est_out_file;
  std::uint64_t est_shots = 0, est_seed = 1;
  double est_eps = 0.0, est_pm = 1e-4;
  est_cmd->add_option("--state", est_state_file,
                      "state JSON: circuit, sparse state, or dense amplitudes")
      ->required();
  est_cmd->add_option("--M", est_shots, "shots per sample set")->required();
  est_cmd->add_option("--eps", est_eps, "infidelity tolerance")->required();
  est_cmd->add_option("--pm", est_pm, "acceptance failure probability");
  est_cmd->add_option("--seed", est_seed, "sampler seed");
  est_cmd->add_option("--out", est_out_file, "also write the report here");
  est_cmd->callback([&] {
    const Statevector state = load_state_file(est_state_file);
    Rng rng(est_seed);
    const CBEstimate est =
        estimate_cb_rank(ShotSource::from_state(state), est_shots, est_eps, est_pm, rng);
    json result = stamped(json{{"state", est_state_file},
                               {"M", est_shots},
                               {"eps", est_eps},
                               {"pm", est_pm}},
                          est_seed);
    result["estimate"] = est.to_json();
    emit_result(result, est_out_file);
  });

  // chop
  auto* chop_cmd = app.add_subcommand(
      "chop", "end-to-end output-probability estimate across a circuit cut");
  ChopArgs chop_args;
  chop_cmd->add_option("--circuit", chop_args.circuit_file, "full circuit JSON")
      ->required();
  chop_cmd->add_option("--cut", chop_args.cut, "layers assigned to the first stage")
      ->required();
  chop_cmd->add_option("--reducer", chop_args.reducer,
                       "reducer circuit JSON, or 'identity'");
  chop_cmd->add_option("--state", chop_args.state_file,
                       "skip estimation: sparse state JSON for the cut");
  chop_cmd->add_option("--x", chop_args.x_list,
                       "comma-separated output bitstrings, or 'all' (n <= 12)");
  chop_cmd->add_option("--M", chop_args.shots,
                       "shots per sample set (0 = protocol default)");
  chop_cmd->add_option("--eps", chop_args.eps, "infidelity tolerance");
  chop_cmd->add_option("--pm", chop_args.p_m, "acceptance failure probability");
  chop_cmd->add_option("--phi-shots", chop_args.phi_shots,
                       "shots per quadrature per retained amplitude");
  chop_cmd->add_option("--second-half-shots", chop_args.second_half_shots,
                       "estimate second-half amplitudes with this budget (0 = exact)");
  chop_cmd->add_flag("--exact", chop_args.exact,
                     "full intermediate-basis sum instead of the sampling pipeline");
  chop_cmd->add_option("--seed", chop_args.seed, "pipeline seed");
  chop_cmd->add_option("--out", chop_args.out_file, "also write the report here");
  chop_cmd->callback([&] { run_chop(chop_args); });

  // verify-bounds
  auto* verify_cmd = app.add_subcommand(
      "verify-bounds", "Monte Carlo audit of a certified inequality");
  VerifyConfig vcfg;
  std::string which_name = "rank-certificate", verify_out_file;
  verify_cmd
      ->add_option("--which", which_name,
                   "rank-certificate (alias lemma2) or fidelity-floor (alias lemma3)")
      ->required();
  verify_cmd->add_option("--trials", vcfg.trials, "Monte Carlo trials (>= 100)")
      ->required();
  verify_cmd->add_option("--n", vcfg.n, "register width");
  verify_cmd->add_option("--family", vcfg.family, "state family: point, ghz, or tfim");
  verify_cmd->add_option("--layers", vcfg.layers, "tfim family: ansatz layers");
  verify_cmd->add_option("--scale", vcfg.param_scale, "tfim family: parameter scale");
  verify_cmd->add_option("--eps", vcfg.eps, "infidelity tolerance");
  verify_cmd->add_option("--pm", vcfg.p_m, "acceptance failure probability");
  verify_cmd->add_option("--M", vcfg.probability_shots,
                         "shots per sample set (0 = protocol default)");
  verify_cmd->add_option("--phi-shots", vcfg.amplitude_shots,
                         "fidelity-floor audit: amplitude shots");
  verify_cmd->add_option("--seed", vcfg.seed, "audit seed");
  verify_cmd->add_option("--out", verify_out_file, "also write the report here");
  verify_cmd->callback([&] {
    vcfg.which = bound_check_from_name(which_name);
    const VerifyReport report = verify_bounds(vcfg);
    json result = stamped(json{{"which", bound_check_name(vcfg.which)},
                               {"trials", vcfg.trials},
                               {"n", vcfg.n},
                               {"family", vcfg.family},
                               {"eps", vcfg.eps},
                               {"pm", vcfg.p_m}},
                          vcfg.seed);
    result["report"] = report.to_json();
    emit_result(result, verify_out_file);
    if (!report.pass) std::exit(3);  // audit ran but the inequality failed
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    if (error_json) {
      std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}},
                        {"artifact_version", kVersion}}
                       .dump()
                << "\n";
    } else {
      std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    if (error_json) {
      std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}},
                        {"artifact_version", kVersion}}
                       .dump()
                << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  }
  return 0;
}
