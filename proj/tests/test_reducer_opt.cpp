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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "reducechop/ansatz.hpp"
#include "reducechop/cb_rank.hpp"
#include "reducechop/chopper.hpp"
#include "reducechop/error.hpp"
#include "reducechop/reducer_opt.hpp"
#include "reducechop/simulator.hpp"
#include "test_util.hpp"

using namespace reducechop;

namespace {

LossContext tfim_hea_context(int n, int l_u, int l_r, std::vector<double> phi,
                             double eps, std::uint64_t shots,
                             ActivationSchedule schedule = ActivationSchedule::kSoft) {
  LossContext ctx;
  ctx.schedule = schedule;
  ctx.qubits = n;
  ctx.build_u1 = [n, l_u](std::span<const double> p) { return build_tfim(n, l_u, p); };
  ctx.phi = std::move(phi);
  ctx.build_reducer = [n, l_r](std::span<const double> p) {
    return build_hea(n, l_r, p);
  };
  ctx.reducer_params = HeaAnsatz{n, l_r}.param_count();
  ctx.shots = shots;
  ctx.eps = eps;
  ctx.p_m = 1e-4;
  return ctx;
}

std::vector<double> scaled_normals(std::size_t count, double scale, Rng& rng) {
  std::vector<double> out(count);
  for (auto& v : out) v = scale * rng.normal();
  return out;
}

double median_of_ten(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return (v[4] + v[5]) / 2.0;
}

}  // namespace

TEST_CASE("protocol defaults: thresholds and shot budgets") {
  CHECK(default_cb_threshold(4) == 12);
  CHECK(default_cb_threshold(5) == 25);
  CHECK(default_cb_threshold(6) == 43);
  CHECK(default_cb_threshold(8) == 102);
  CHECK(default_probability_shots(6, 0.08) == 8438);
  CHECK(default_probability_shots(8, 0.08) == 20000);
  CHECK(default_probability_shots(6, 0.13) == 3196);
  CHECK(default_probability_shots(6, 0.02) == 135000);
  CHECK_THROWS_AS(default_cb_threshold(0), Error);
  CHECK_THROWS_AS(default_probability_shots(6, 0.0), Error);
  CHECK_THROWS_AS(default_probability_shots(6, 1.0), Error);

  CHECK(schedule_from_name("soft") == ActivationSchedule::kSoft);
  CHECK(schedule_from_name("parametric") == ActivationSchedule::kParametric);
  CHECK(schedule_name(ActivationSchedule::kSoft) == "soft");
  CHECK(schedule_name(ActivationSchedule::kParametric) == "parametric");
  CHECK_THROWS_AS(schedule_from_name("hard"), Error);
}

TEST_CASE("LossValue: penalty ordering and divergence") {
  auto make = [](int k, double p, bool f) {
    CBEstimate est;
    est.K = k;
    est.p = p;
    est.F = f;
    return LossValue::from_estimate(est);
  };
  // Equal rank: strictly increasing in the failure probability.
  double prev = -1.0;
  for (double p : {0.0, 1e-8, 1e-4, 0.1, 0.5, 0.99}) {
    const LossValue lv = make(7, p, true);
    CHECK(lv.value > prev);
    CHECK(lv.value >= lv.K);
    prev = lv.value;
  }
  // A certain failure diverges.
  const LossValue diverged = make(12, 1.0, false);
  CHECK(std::isinf(diverged.value));
  CHECK(diverged.value > 0.0);
  CHECK_FALSE(diverged.estimable);
  // With p at the acceptance level, rank differences dominate: the log terms
  // contribute at most -log(1 - 1e-4) each.
  const double log_slack = 2.0 * -std::log1p(-1e-4);
  for (int k = 1; k <= 40; ++k) {
    CHECK(make(k + 1, 1e-4, true).value - make(k, 1e-4, true).value >=
          1.0 - log_slack);
  }
}

TEST_CASE("loss: inactive first half gives the closed-form unit-rank value") {
  LossContext ctx = tfim_hea_context(4, 2, 1, std::vector<double>(16, 1.0), 0.1, 2000);
  Rng rng(3);
  const std::vector<double> theta(ctx.reducer_params, 0.0);
  const LossValue lv = loss(theta, 0.0, ctx, rng);
  CHECK(lv.K == 1);
  CHECK(lv.estimable);
  CHECK(lv.p == doctest::Approx(std::exp(-2.0 * 2000 * 0.01)).epsilon(1e-12));
  CHECK(lv.value ==
        doctest::Approx(1.0 - std::log1p(-std::exp(-2.0 * 2000 * 0.01))).epsilon(1e-12));
}

TEST_CASE("loss: a reducer that inverts the first half pins the rank to one") {
  Rng rng(11);
  const Circuit u1 = testutil::random_circuit(4, 3, rng);
  LossContext ctx;
  ctx.schedule = ActivationSchedule::kSoft;
  ctx.qubits = 4;
  ctx.build_u1 = [&u1](std::span<const double>) { return u1; };
  ctx.build_reducer = [&u1](std::span<const double>) { return u1.dagger(); };
  ctx.reducer_params = 3;
  ctx.shots = 2000;
  ctx.eps = 0.1;
  ctx.p_m = 1e-4;
  for (unsigned seed : {1u, 2u, 3u}) {
    Rng eval(seed);
    std::vector<double> theta = random_params(3, eval);
    const LossValue lv = loss(theta, 1.0, ctx, eval);
    CHECK(lv.K == 1);
    CHECK(lv.estimable);
  }
}

TEST_CASE("loss: full-activation batch certifies and failures dominate") {
  // At n=6 the protocol budget covers the register many times over, so every
  // full-activation estimate certifies; a wide 10-qubit state at a small
  // budget shows the divergent branch and the ordering between the two.
  const int n = 6;
  Rng setup(2026);
  LossContext ctx = tfim_hea_context(
      n, 2, 2, scaled_normals(TfimAnsatz{n, 2}.param_count(), 0.5, setup), 0.08, 8438);
  double max_value = 0.0;
  for (unsigned seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    std::vector<double> theta = random_params(ctx.reducer_params, rng);
    const LossValue lv = loss(theta, 1.0, ctx, rng);
    CHECK(lv.estimable);
    CHECK(std::isfinite(lv.value));
    max_value = std::max(max_value, lv.value);
  }

  std::vector<double> wall(TfimAnsatz{10, 1}.param_count(), 0.0);
  for (std::size_t i = 0; i < 10; ++i) wall[i] = std::acos(-1.0) / 2.0;
  LossContext wide = tfim_hea_context(10, 1, 1, wall, 0.1, 1000);
  Rng rng(4);
  const LossValue failed =
      loss(std::vector<double>(wide.reducer_params, 0.0), 1.0, wide, rng);
  CHECK_FALSE(failed.estimable);
  CHECK(std::isinf(failed.value));
  CHECK(failed.value > max_value);

  LossContext narrow = tfim_hea_context(10, 1, 1, std::vector<double>(20, 0.0), 0.1, 1000);
  Rng rng2(4);
  const LossValue fine =
      loss(std::vector<double>(narrow.reducer_params, 0.0), 1.0, narrow, rng2);
  CHECK(fine.estimable);
  CHECK(std::isfinite(fine.value));
}

TEST_CASE("loss: context validation rejects malformed problems") {
  LossContext ctx = tfim_hea_context(4, 1, 1, std::vector<double>(8, 0.0), 0.1, 1000);
  Rng rng(1);
  const std::vector<double> theta(ctx.reducer_params, 0.0);

  LossContext bad = ctx;
  bad.eps = 0.0;
  CHECK_THROWS_AS(loss(theta, 0.5, bad, rng), Error);
  bad = ctx;
  bad.build_reducer = nullptr;
  CHECK_THROWS_AS(loss(theta, 0.5, bad, rng), Error);
  bad = ctx;
  bad.shots = 0;
  CHECK_THROWS_AS(loss(theta, 0.5, bad, rng), Error);
  bad = ctx;
  bad.schedule = ActivationSchedule::kParametric;
  bad.phi.clear();
  CHECK_THROWS_AS(loss(theta, 0.5, bad, rng), Error);
  CHECK_THROWS_AS(loss(theta, -0.1, ctx, rng), Error);
  CHECK_THROWS_AS(loss(theta, 1.1, ctx, rng), Error);
}

TEST_CASE("LossContext: parametric activation enables a prefix of parameters") {
  Rng rng(9);
  std::vector<double> phi = scaled_normals(8, 0.8, rng);
  LossContext ctx =
      tfim_hea_context(4, 1, 1, phi, 0.1, 1000, ActivationSchedule::kParametric);
  const Statevector half = ctx.activated_state(0.5);
  const Statevector direct = run_circuit(build_tfim(4, 1, parametric_activation(phi, 4)));
  double worst = 0.0;
  for (std::size_t i = 0; i < half.dimension(); ++i)
    worst = std::max(worst, std::abs(half[i] - direct[i]));
  CHECK(worst <= 1e-14);
  const Statevector off = ctx.activated_state(0.0);
  CHECK(probability(off, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("EsState: defaults, invariants, and constructor guards") {
  EsState small(std::vector<double>(2, 0.0), 0.5);
  CHECK(small.lambda() == 6);
  CHECK(small.mu() == 3);
  EsState mid(std::vector<double>(8, 0.0), 0.5);
  CHECK(mid.lambda() == 10);
  CHECK(mid.mu() == 5);
  EsState wide(std::vector<double>(72, 0.0), 0.5);
  CHECK(wide.lambda() == 16);

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < mid.weights().size(); ++i)
    CHECK(mid.weights()[i] > mid.weights()[i + 1]);
  for (double w : mid.weights()) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(EsState({}, 0.5), Error);
  CHECK_THROWS_AS(EsState(std::vector<double>(4, 0.0), 0.0), Error);
  CHECK_THROWS_AS(EsState(std::vector<double>(4, 0.0), 0.5, 1), Error);
}

TEST_CASE("es_step: quadratic bowl converges for nearly every seed") {
  const std::vector<double> target = {0.3, -0.7, 0.1, 0.9, -0.2, 0.5, -0.4, 0.6};
  const LossFn bowl = [&target](std::span<const double> th, Rng&) {
    double v = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i)
      v += (th[i] - target[i]) * (th[i] - target[i]);
    LossValue lv;
    lv.K = 1;
    lv.p = 0.0;
    lv.value = v;
    lv.estimable = true;
    return lv;
  };
  int converged = 0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    EsState es(std::vector<double>(8, 0.0), 0.5);
    for (int g = 0; g < 500; ++g) {
      es_step(es, bowl, rng);
      double dist = 0.0;
      for (std::size_t i = 0; i < 8; ++i)
        dist += (es.mean()[i] - target[i]) * (es.mean()[i] - target[i]);
      if (std::sqrt(dist) <= 1e-3) {
        ++converged;
        break;
      }
    }
  }
  CHECK(converged >= 19);
}

TEST_CASE("es_step: constant loss leaves an unbiased random walk") {
  const LossFn flat = [](std::span<const double>, Rng&) {
    LossValue lv;
    lv.K = 5;
    lv.p = 0.5;
    lv.value = 4.3;
    lv.estimable = true;
    return lv;
  };
  const double sigma = 0.7;
  const int trials = 2000;

  // With every value equal the ranking is the sampling order, so the mean
  // update is exactly N(0, sigma^2 sum(w^2) I) before adaptation kicks in.
  for (int d : {2, 4}) {
    EsState probe(std::vector<double>(std::size_t(d), 0.0), sigma);
    double wsq = 0.0;
    for (double w : probe.weights()) wsq += w * w;
    const double coord_sd = sigma * std::sqrt(wsq);

    Rng rng(99);
    double sum_norm = 0.0;
    double coord_sum = 0.0;
    double coord_sq = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      EsState es(std::vector<double>(std::size_t(d), 0.0), sigma);
      es_step(es, flat, rng);
      double n2 = 0.0;
      for (double c : es.mean()) {
        n2 += c * c;
        coord_sum += c;
        coord_sq += c * c;
      }
      sum_norm += std::sqrt(n2);
    }
    const double samples = double(trials) * d;
    CHECK(std::abs(coord_sum / samples) <= 4.0 * coord_sd / std::sqrt(samples));
    CHECK(std::sqrt(coord_sq / samples) == doctest::Approx(coord_sd).epsilon(0.05));
    if (d == 2) {
      // The norm-level random-walk bound holds at low dimension.
      CHECK(sum_norm / trials <= sigma * 3.0 / std::sqrt(double(probe.lambda())));
    }
  }
}

TEST_CASE("es_step: the lone certifiable candidate wins the recombination") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    EsState es(std::vector<double>(6, 0.1), 0.4, 2);  // mu = 1: winner takes all
    std::vector<std::vector<double>> seen;
    const LossFn pick = [&seen](std::span<const double> th, Rng&) {
      seen.emplace_back(th.begin(), th.end());
      LossValue lv;
      if (seen.size() % 2 == 0) {  // second candidate of the pair certifies
        lv.K = 2;
        lv.p = 1e-5;
        lv.value = 2.0;
        lv.estimable = true;
      } else {
        lv.K = 50;
        lv.p = 1.0;
        lv.value = std::numeric_limits<double>::infinity();
        lv.estimable = false;
      }
      return lv;
    };
    const EsStepResult res = es_step(es, pick, rng);
    REQUIRE(seen.size() == 2);
    CHECK(res.best.loss.estimable);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(es.mean()[i] == doctest::Approx(seen[1][i]).epsilon(1e-12));
      CHECK(res.best.theta[i] == doctest::Approx(seen[1][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("es_step: covariance stays symmetric positive definite") {
  Rng rng(31);
  EsState es(std::vector<double>(5, 0.0), 0.8);
  const LossFn noisy = [](std::span<const double> th, Rng& r) {
    LossValue lv;
    lv.K = 1;
    lv.p = 0.0;
    lv.value = std::sin(37.0 * th[0]) + th[2] * th[2] + 0.3 * r.normal();
    lv.estimable = true;
    return lv;
  };
  for (int g = 0; g < 60; ++g) {
    es_step(es, noisy, rng);
    CHECK(es.sigma() > 0.0);
    for (int i = 0; i < es.dim(); ++i)
      for (int j = 0; j < i; ++j)
        CHECK(es.cov_at(i, j) == doctest::Approx(es.cov_at(j, i)).epsilon(1e-12));
    Eigen::Map<const Eigen::MatrixXd> cov(es.cov().data(), 5, 5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() >= 1e-12 - 1e-15);
  }
  CHECK(es.generation() == 60);
  CHECK(es.repairs() >= 0);
}

TEST_CASE("optimize_reducer: zero budget returns the starting point as failed") {
  ActivationController ctl;
  ctl.schedule = ActivationSchedule::kSoft;
  ctl.t = 1.0;
  ctl.cb_threshold = 10;
  ctl.context = tfim_hea_context(4, 1, 1, std::vector<double>(8, 0.4), 0.1, 1000);
  Rng rng(5);
  EsState es(std::vector<double>(ctl.context.reducer_params, 0.25), 0.1);
  const OptimizeOutcome out = optimize_reducer(ctl, es, 0, rng);
  CHECK(out.failed);
  CHECK(out.exit == OptExit::kBudget);
  CHECK(out.generations == 0);
  CHECK(out.evaluations == 0);
  CHECK(ctl.history.empty());
  for (double v : out.theta) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("optimize_reducer: an in-architecture inverse reaches unit rank") {
  const std::vector<double> phi = {0.9, -0.7, 0.4, 0.0, 0.0, 0.0};
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    ActivationController ctl;
    ctl.schedule = ActivationSchedule::kSoft;
    ctl.t = 1.0;
    ctl.cb_threshold = 1;  // resume target clamps to rank 1 exactly
    ctl.stall_window = 100;
    ctl.context.schedule = ActivationSchedule::kSoft;
    ctl.context.qubits = 3;
    ctl.context.build_u1 = [&phi](std::span<const double>) {
      return build_tfim(3, 1, phi);
    };
    ctl.context.phi = phi;
    ctl.context.build_reducer = [](std::span<const double> p) {
      return build_tfim(3, 1, p);
    };
    ctl.context.reducer_params = 6;
    ctl.context.shots = 2000;
    ctl.context.eps = 0.1;
    ctl.context.p_m = 1e-4;
    Rng rng(seed);
    EsState es(std::vector<double>(6, 0.0), 0.3);
    const OptimizeOutcome out = optimize_reducer(ctl, es, 5000, rng);
    CHECK(out.exit == OptExit::kThreshold);
    CHECK(out.best.K == 1);
    CHECK_FALSE(out.failed);
    CHECK(std::size_t(out.generations) == ctl.history.size());
  }
}

TEST_CASE("optimize_reducer: generous tolerance ends at the resume target") {
  int via_threshold = 0;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    Rng setup(seed * 31);
    ActivationController ctl;
    ctl.schedule = ActivationSchedule::kSoft;
    ctl.t = 1.0;
    ctl.cb_threshold = default_cb_threshold(6);
    ctl.context = tfim_hea_context(
        6, 3, 2, scaled_normals(TfimAnsatz{6, 3}.param_count(), 1.0, setup), 0.13,
        default_probability_shots(6, 0.13));
    Rng rng(seed);
    EsState es(std::vector<double>(ctl.context.reducer_params, 0.0), 0.13);
    const OptimizeOutcome out = optimize_reducer(ctl, es, 1500, rng);
    if (out.exit == OptExit::kThreshold) ++via_threshold;
  }
  CHECK(via_threshold >= 8);
}

TEST_CASE("optimize_reducer: flat loss stalls after the patience window") {
  ActivationController ctl;
  ctl.schedule = ActivationSchedule::kSoft;
  ctl.t = 1.0;
  ctl.cb_threshold = 2;
  ctl.stall_window = 20;
  ctl.context = tfim_hea_context(4, 1, 1, std::vector<double>(8, 0.4), 0.1, 1000);
  Rng rng(8);
  EsState es(std::vector<double>(ctl.context.reducer_params, 0.0), 0.2);
  // Bypass the rank machinery with a constant objective: the first
  // generation sets the best, every later one counts toward the stall.
  std::uint64_t calls = 0;
  const LossFn flat = [&calls](std::span<const double>, Rng&) {
    ++calls;
    LossValue lv;
    lv.K = 5;
    lv.p = 0.1;
    lv.value = 5.0 - std::log1p(-0.1);
    lv.estimable = true;
    return lv;
  };
  OptimizeOutcome out;
  {
    // optimize_reducer owns the loss through the controller, so drive the
    // same loop shape manually to pin the stall-exit bookkeeping.
    const auto lambda = std::uint64_t(es.lambda());
    int since = 0;
    bool have = false;
    while (out.evaluations + lambda <= 10000) {
      const EsStepResult step = es_step(es, flat, rng);
      out.evaluations += lambda;
      out.generations += 1;
      const bool improved = !have || step.best.loss.value < out.best.value;
      if (improved) {
        out.best = step.best.loss;
        have = true;
        since = 0;
      } else {
        ++since;
      }
      if (have && out.best.K <= ctl.resume_threshold()) break;
      if (since >= ctl.stall_window) break;
    }
  }
  CHECK(out.generations == 1 + ctl.stall_window);
  CHECK(calls == std::uint64_t(out.generations) * std::uint64_t(es.lambda()));
}

TEST_CASE("run_activation: an inactive first half never invokes the optimizer") {
  ActivationProblem prob;
  prob.context = tfim_hea_context(4, 1, 1, std::vector<double>(8, 0.0), 0.1, 1000);
  prob.cb_threshold = default_cb_threshold(4);
  prob.optimize_budget = 200;
  prob.amplitude_shots = 4096;
  Rng rng(21);
  const ExperimentRecord rec = run_activation(prob, rng);
  CHECK(rec.success);
  CHECK(rec.optimizer_invocations == 0);
  CHECK(rec.loss_evaluations == 0);
  CHECK(rec.final_k == 1);
  double prev_t = -1.0;
  for (const auto& row : rec.trajectory) {
    CHECK(row.K == 1);
    CHECK(row.phase == "activate");
    CHECK(row.t >= prev_t);
    prev_t = row.t;
  }
  CHECK(prev_t == 1.0);
  CHECK(rec.trajectory.size() >= 100);
  REQUIRE(rec.reconstructed.has_value());
  CHECK(rec.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rec.bound > 0.89);
  CHECK(rec.fidelity >= rec.bound);
}

TEST_CASE("run_activation: the 8-qubit halving instance meets its threshold") {
  // Two 20-layer-deep halves, a 4-layer reducer, and the published protocol
  // budgets; majority success with the certified bound respected throughout.
  int successes = 0;
  int engaged = 0;
  int bound_ok = 0;
  ExperimentRecord first_record;
  std::vector<double> first_phi;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    Rng setup(seed * 1000);
    std::vector<double> phi =
        scaled_normals(TfimAnsatz{8, 5}.param_count(), 0.8, setup);
    ActivationProblem prob;
    prob.context = tfim_hea_context(8, 5, 2, phi, 0.08,
                                    default_probability_shots(8, 0.08));
    prob.cb_threshold = default_cb_threshold(8);
    prob.optimize_budget = 640;
    prob.amplitude_shots = 32768;
    prob.instance_id = std::to_string(seed);
    Rng rng(seed);
    const ExperimentRecord rec = run_activation(prob, rng);
    if (seed == 1) {
      first_record = rec;
      first_phi = phi;
    }
    if (rec.success) {
      ++successes;
      CHECK(rec.final_k <= 102);
      if (rec.fidelity >= rec.bound) ++bound_ok;
      CHECK(rec.bound > 0.9);
    }
    if (rec.optimizer_invocations > 0) ++engaged;
  }
  CHECK(successes >= 6);
  CHECK(engaged >= 1);
  CHECK(bound_ok == successes);

  // The executable pieces after the cut: 20 entangling layers per half plus
  // a 4-layer reducer caps the run depth at 24 against 40 for the original.
  Rng aux(77);
  ChopPlan plan({build_tfim(8, 5, first_phi),
                 build_tfim(8, 5, scaled_normals(TfimAnsatz{8, 5}.param_count(), 0.8, aux))},
                {build_hea(8, 2, first_record.theta_star)});
  plan.set_reported_depths({20, 20}, {4});
  CHECK(TfimAnsatz{8, 10}.reported_depth() == 40);
  CHECK(plan.depth_report().max_circuit_depth() == 24);
}

TEST_CASE("run_activation: tighter tolerance costs more optimizer invocations") {
  std::vector<int> tight, loose;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    Rng setup(seed * 777);
    const std::vector<double> phi =
        scaled_normals(TfimAnsatz{6, 5}.param_count(), 1.3, setup);
    for (const double eps : {0.02, 0.08}) {
      ActivationProblem prob;
      prob.context = tfim_hea_context(6, 5, 2, phi, eps, 20000);
      prob.cb_threshold = default_cb_threshold(6);
      prob.dt = 0.05;
      prob.optimize_budget = 150;
      prob.amplitude_shots = 8192;
      Rng rng(seed);
      const ExperimentRecord rec = run_activation(prob, rng);
      (eps == 0.02 ? tight : loose).push_back(rec.optimizer_invocations);
    }
  }
  CHECK(median_of_ten(tight) > median_of_ten(loose));
  int pairwise = 0;
  for (std::size_t i = 0; i < 10; ++i)
    if (tight[i] > loose[i]) ++pairwise;
  CHECK(pairwise >= 7);
}

TEST_CASE("run_activation: parametric schedule polishes after each parameter") {
  Rng setup(12);
  std::vector<double> phi = scaled_normals(TfimAnsatz{4, 1}.param_count(), 0.8, setup);
  ActivationProblem prob;
  prob.context =
      tfim_hea_context(4, 1, 1, phi, 0.1, 2000, ActivationSchedule::kParametric);
  prob.cb_threshold = default_cb_threshold(4);
  prob.optimize_budget = 200;
  prob.periodic_generations = 3;
  prob.amplitude_shots = 4096;
  Rng rng(7);
  const ExperimentRecord rec = run_activation(prob, rng);
  CHECK(rec.success);
  CHECK(rec.optimizer_invocations == 8);  // one polish pass per parameter
  CHECK(rec.fidelity >= rec.bound);

  // Activation rows visit the exact i/8 grid, and t never decreases.
  std::vector<double> activation_ts;
  double prev_t = -1.0;
  for (const auto& row : rec.trajectory) {
    CHECK(row.t >= prev_t);
    prev_t = row.t;
    if (row.phase == "activate") activation_ts.push_back(row.t);
  }
  REQUIRE(activation_ts.size() == 10);  // 0, the eight levels, and the final check
  for (std::size_t i = 0; i <= 8; ++i)
    CHECK(activation_ts[i] == doctest::Approx(double(i) / 8.0).epsilon(1e-15));
  CHECK(activation_ts.back() == 1.0);
}

TEST_CASE("run_activation: a sharp rank jump refines the sweep step") {
  // A uniform-superposition first half turns on abruptly: once the tail
  // crosses the tolerance the rank leaps, which must halve the sweep step.
  std::vector<double> wall(TfimAnsatz{6, 1}.param_count(), 0.0);
  for (std::size_t i = 0; i < 6; ++i) wall[i] = std::acos(-1.0) / 2.0;
  ActivationProblem prob;
  prob.context = tfim_hea_context(6, 1, 1, wall, 0.1, 2000);
  prob.cb_threshold = 64;  // out of reach: isolate the sweep behavior
  prob.optimize_budget = 100;
  prob.amplitude_shots = 4096;
  Rng rng(3);
  const ExperimentRecord rec = run_activation(prob, rng);
  bool saw_fine_step = false;
  double prev_t = -1.0;
  int max_k = 0;
  for (const auto& row : rec.trajectory) {
    if (row.phase != "activate") continue;
    if (prev_t >= 0.0 && row.t < 1.0) {
      const double delta = row.t - prev_t;
      CHECK(delta > 0.0);
      CHECK(delta >= 0.01 / 32.0 - 1e-12);
      if (delta < 0.009) saw_fine_step = true;
    }
    prev_t = row.t;
    max_k = std::max(max_k, row.K);
  }
  CHECK(saw_fine_step);
  CHECK(max_k > 8);  // the jump actually happened
}

TEST_CASE("run_activation: a budget too small to certify marks the run failed") {
  std::vector<double> wall(TfimAnsatz{8, 1}.param_count(), 0.0);
  for (std::size_t i = 0; i < 8; ++i) wall[i] = std::acos(-1.0) / 2.0;
  ActivationProblem prob;
  prob.context = tfim_hea_context(8, 1, 1, wall, 0.05, 1000);  // gate needs 1843
  prob.cb_threshold = default_cb_threshold(8);
  prob.dt = 0.05;
  prob.optimize_budget = 60;
  prob.amplitude_shots = 4096;
  Rng rng(13);
  const ExperimentRecord rec = run_activation(prob, rng);
  CHECK_FALSE(rec.success);
  CHECK_FALSE(rec.final_estimable);
  CHECK(rec.optimizer_invocations >= 1);
  CHECK(rec.fidelity == 0.0);
  CHECK_FALSE(rec.reconstructed.has_value());
  CHECK_FALSE(rec.trajectory.empty());  // the record survives the failure
}

TEST_CASE("run_activation: accepted estimates always sit under the audit line") {
  Rng setup(12);
  std::vector<double> phi = scaled_normals(TfimAnsatz{4, 1}.param_count(), 0.8, setup);
  ActivationProblem prob;
  prob.context = tfim_hea_context(4, 1, 1, phi, 0.1, 2000);
  prob.cb_threshold = default_cb_threshold(4);
  prob.optimize_budget = 200;
  prob.amplitude_shots = 4096;
  Rng rng(5);
  const ExperimentRecord rec = run_activation(prob, rng);
  int audited = 0;
  for (const auto& row : rec.trajectory) {
    if (row.estimable) {
      CHECK(row.p < 1e-4);
      ++audited;
    }
  }
  CHECK(audited > 0);
}

TEST_CASE("run_activation: identical configuration and seed reproduce the run") {
  Rng setup(12);
  std::vector<double> phi = scaled_normals(TfimAnsatz{4, 1}.param_count(), 0.8, setup);
  ActivationProblem prob;
  prob.context = tfim_hea_context(4, 1, 1, phi, 0.1, 2000);
  prob.cb_threshold = default_cb_threshold(4);
  prob.optimize_budget = 200;
  prob.amplitude_shots = 4096;
  prob.instance_id = "repro";
  Rng a(31);
  Rng b(31);
  const ExperimentRecord ra = run_activation(prob, a);
  const ExperimentRecord rb = run_activation(prob, b);
  CHECK(ra.to_json().dump() == rb.to_json().dump());
  REQUIRE(ra.trajectory.size() == rb.trajectory.size());
  for (std::size_t i = 0; i < ra.trajectory.size(); ++i)
    CHECK(ra.trajectory[i].csv_row() == rb.trajectory[i].csv_row());
  CHECK(ra.theta_star == rb.theta_star);
}

TEST_CASE("trajectory rows and records serialize with stable shapes") {
  TrajectoryRow row;
  row.instance_id = "7";
  row.phase = "optimize";
  row.t = 0.5;
  row.generation = 3;
  row.K = 12;
  row.p = 0.25;
  row.loss = 12.5;
  row.estimable = true;
  CHECK(TrajectoryRow::csv_header() == "instance_id,phase,t,generation,K,p,loss,estimable");
  CHECK(row.csv_row() == "7,optimize,0.5,3,12,0.25,12.5,1");

  ExperimentRecord rec;
  rec.theta_star = {0.25, -1.5};
  rec.success = true;
  rec.final_k = 4;
  rec.fidelity = 0.95;
  const nlohmann::json j = rec.to_json();
  CHECK(j.at("theta_star").size() == 2);
  CHECK(j.at("success") == true);
  CHECK(j.at("final_k") == 4);
  CHECK(j.at("reconstructed").is_null());
}

TEST_CASE("activation problems and controllers reject malformed setups") {
  ActivationProblem prob;
  prob.context = tfim_hea_context(4, 1, 1, std::vector<double>(8, 0.0), 0.1, 1000);
  prob.cb_threshold = default_cb_threshold(4);
  prob.optimize_budget = 100;
  Rng rng(1);

  ActivationProblem bad = prob;
  bad.cb_threshold = 0;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);
  bad = prob;
  bad.dt = 0.0;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);
  bad = prob;
  bad.periodic_generations = 0;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);
  bad = prob;
  bad.context.reducer_params = 0;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);
  bad = prob;
  bad.sigma0 = -0.5;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);
  bad = prob;
  bad.resume_fraction = 0.0;
  CHECK_THROWS_AS(run_activation(bad, rng), Error);

  ActivationController ctl;
  ctl.schedule = ActivationSchedule::kParametric;  // context says soft
  ctl.cb_threshold = 5;
  ctl.context = prob.context;
  EsState es(std::vector<double>(ctl.context.reducer_params, 0.0), 0.1);
  CHECK_THROWS_AS(optimize_reducer(ctl, es, 100, rng), Error);
}
