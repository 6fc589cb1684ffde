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

#include "reducechop/reducer_opt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "reducechop/amplitude_est.hpp"
#include "reducechop/ansatz.hpp"
#include "reducechop/config.hpp"
#include "reducechop/error.hpp"
#include "reducechop/simulator.hpp"

namespace reducechop {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ActivationSchedule schedule_from_name(const std::string& name) {
  if (name == "soft") return ActivationSchedule::kSoft;
  if (name == "parametric") return ActivationSchedule::kParametric;
  fail("bad_argument", "unknown activation schedule: " + name);
}

std::string schedule_name(ActivationSchedule schedule) {
  return schedule == ActivationSchedule::kSoft ? "soft" : "parametric";
}

void LossContext::validate() const {
  if (qubits < 1) fail("bad_params", "loss context needs at least one qubit");
  if (!build_u1 || !build_reducer)
    fail("bad_params", "loss context needs both circuit builders");
  if (shots < 1) fail("bad_params", "loss context needs a positive shot budget");
  if (!(eps > 0.0) || !(eps < 1.0))
    fail("bad_params", "loss context eps must lie in (0, 1)");
  if (!(p_m > 0.0) || !(p_m < 1.0))
    fail("bad_params", "loss context p_m must lie in (0, 1)");
  if (schedule == ActivationSchedule::kParametric && phi.empty())
    fail("bad_params", "parametric activation needs first-half parameters");
}

Statevector LossContext::activated_state(double t) const {
  if (!(t >= 0.0) || !(t <= 1.0))
    fail("bad_params", "activation level must lie in [0, 1]");
  if (schedule == ActivationSchedule::kSoft) return soft_activated_state(build_u1(phi), t);
  const auto total = static_cast<double>(phi.size());
  auto active = static_cast<std::size_t>(std::llround(t * total));
  active = std::min(active, phi.size());
  return run_circuit(build_u1(parametric_activation(phi, active)));
}

LossValue LossValue::from_estimate(const CBEstimate& estimate) {
  LossValue out;
  out.K = estimate.K;
  out.p = estimate.p;
  out.estimable = estimate.F;
  // -log1p(-1) is -inf, so a certain failure diverges as intended.
  out.value = double(estimate.K) - std::log1p(-estimate.p);
  return out;
}

namespace {

CBEstimate estimate_at(std::span<const double> theta, double t,
                       const LossContext& context, Rng& rng) {
  const Statevector activated = context.activated_state(t);
  const Statevector reduced = run_circuit(context.build_reducer(theta), activated);
  return estimate_cb_rank(ShotSource::from_state(reduced), context.shots, context.eps,
                          context.p_m, rng);
}

}  // namespace

LossValue loss(std::span<const double> theta, double t, const LossContext& context,
               Rng& rng) {
  context.validate();
  return LossValue::from_estimate(estimate_at(theta, t, context, rng));
}

EsState::EsState(std::vector<double> mean, double sigma, int lambda)
    : mean_(std::move(mean)), sigma_(sigma) {
  if (mean_.empty()) fail("bad_params", "evolution strategy needs parameters");
  if (!(sigma_ > 0.0)) fail("bad_params", "step size must be positive");
  const auto d = static_cast<int>(mean_.size());
  lambda_ = lambda == 0 ? 4 + int(std::floor(3.0 * std::log(double(d)))) : lambda;
  if (lambda_ < 2) fail("bad_params", "population must hold at least two candidates");
  mu_ = lambda_ / 2;
  weights_.resize(std::size_t(mu_));
  double total = 0.0;
  for (int i = 0; i < mu_; ++i) {
    weights_[std::size_t(i)] = std::log(mu_ + 0.5) - std::log(double(i + 1));
    total += weights_[std::size_t(i)];
  }
  double sq = 0.0;
  for (auto& w : weights_) {
    w /= total;
    sq += w * w;
  }
  mu_eff_ = 1.0 / sq;
  cov_.assign(mean_.size() * mean_.size(), 0.0);
  for (std::size_t i = 0; i < mean_.size(); ++i) cov_[i * mean_.size() + i] = 1.0;
  p_sigma_.assign(mean_.size(), 0.0);
  p_cov_.assign(mean_.size(), 0.0);
}

// Grants es_step access to the strategy internals while keeping the header
// free of the linear-algebra dependency.
struct EsStepAccess {
  static EsStepResult step(EsState& s, const LossFn& loss_fn, Rng& rng) {
    const int d = s.dim();
    const int lambda = s.lambda_;
    const int mu = s.mu_;
    const double mu_eff = s.mu_eff_;

    const double c_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (d + 1.0)) - 1.0) + c_sigma;
    const double c_cov = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
    const double c_one = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
    const double c_mu = std::min(
        1.0 - c_one, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((d + 2.0) * (d + 2.0) + mu_eff));
    const double chi_d =
        std::sqrt(double(d)) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * double(d) * d));

    Eigen::Map<Eigen::MatrixXd> cov(s.cov_.data(), d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kTol.eigen_floor);
    const Eigen::MatrixXd& basis = eig.eigenvectors();
    const Eigen::VectorXd scale = vals.cwiseSqrt();

    // Sample lambda candidates theta_k = mean + sigma * B * (scale .* z_k).
    Eigen::Map<const Eigen::VectorXd> mean(s.mean_.data(), d);
    std::vector<Eigen::VectorXd> steps(static_cast<std::size_t>(lambda));
    std::vector<EsCandidate> candidates(static_cast<std::size_t>(lambda));
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(d);
      for (int i = 0; i < d; ++i) z[i] = rng.normal();
      steps[std::size_t(k)] = basis * scale.cwiseProduct(z).eval();
      Eigen::VectorXd theta = mean + s.sigma_ * steps[std::size_t(k)];
      candidates[std::size_t(k)].theta.assign(theta.data(), theta.data() + d);
    }
    Rng eval_root(rng.next());
    for (int k = 0; k < lambda; ++k) {
      Rng eval = eval_root.child(std::uint64_t(k));
      candidates[std::size_t(k)].loss = loss_fn(candidates[std::size_t(k)].theta, eval);
    }

    std::vector<int> order(static_cast<std::size_t>(lambda));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const LossValue& la = candidates[std::size_t(a)].loss;
      const LossValue& lb = candidates[std::size_t(b)].loss;
      if (la.value != lb.value) return la.value < lb.value;
      if (la.K != lb.K) return la.K < lb.K;
      return la.p < lb.p;
    });

    Eigen::VectorXd step_w = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < mu; ++i)
      step_w += s.weights_[std::size_t(i)] * steps[std::size_t(order[std::size_t(i)])];
    Eigen::VectorXd new_mean = mean + s.sigma_ * step_w;

    // Cumulative step-size path in the whitened coordinates.
    const Eigen::VectorXd whitened =
        basis * scale.cwiseInverse().cwiseProduct((basis.transpose() * step_w).eval());
    Eigen::Map<Eigen::VectorXd> p_sigma(s.p_sigma_.data(), d);
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened;
    s.generation_ += 1;
    const double expected = 1.0 - std::pow(1.0 - c_sigma, 2.0 * double(s.generation_));
    const bool h_sigma = p_sigma.norm() / std::sqrt(expected) <
                         (1.4 + 2.0 / (d + 1.0)) * chi_d;

    Eigen::Map<Eigen::VectorXd> p_cov(s.p_cov_.data(), d);
    p_cov = (1.0 - c_cov) * p_cov;
    if (h_sigma) p_cov += std::sqrt(c_cov * (2.0 - c_cov) * mu_eff) * step_w;

    const double stall_fill = h_sigma ? 0.0 : c_cov * (2.0 - c_cov);
    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd& y = steps[std::size_t(order[std::size_t(i)])];
      rank_mu += s.weights_[std::size_t(i)] * (y * y.transpose());
    }
    Eigen::MatrixXd updated = (1.0 - c_one - c_mu) * cov +
                              c_one * (p_cov * p_cov.transpose() + stall_fill * cov) +
                              c_mu * rank_mu;
    updated = 0.5 * (updated + updated.transpose()).eval();

    EsStepResult result;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(updated);
    if (check.eigenvalues().minCoeff() < kTol.eigen_floor) {
      const Eigen::VectorXd floored = check.eigenvalues().cwiseMax(kTol.eigen_floor);
      updated = check.eigenvectors() * floored.asDiagonal() *
                check.eigenvectors().transpose();
      s.repairs_ += 1;
      result.repaired = true;
    }
    cov = updated;

    s.sigma_ *= std::exp((c_sigma / d_sigma) * (p_sigma.norm() / chi_d - 1.0));
    for (int i = 0; i < d; ++i) s.mean_[std::size_t(i)] = new_mean[i];

    result.best = candidates[std::size_t(order[0])];
    return result;
  }
};

EsStepResult es_step(EsState& state, const LossFn& loss_fn, Rng& rng) {
  return EsStepAccess::step(state, loss_fn, rng);
}

std::string TrajectoryRow::csv_header() {
  return "instance_id,phase,t,generation,K,p,loss,estimable";
}

std::string TrajectoryRow::csv_row() const {
  std::ostringstream out;
  out << instance_id << ',' << phase << ',' << format_double(t) << ',' << generation
      << ',' << K << ',' << format_double(p) << ',' << format_double(loss) << ','
      << (estimable ? 1 : 0);
  return out.str();
}

double ActivationController::resume_threshold() const {
  return std::max(1.0, resume_fraction * cb_threshold);
}

void ActivationController::validate() const {
  context.validate();
  if (schedule != context.schedule)
    fail("bad_params", "controller and loss context disagree on the schedule");
  if (cb_threshold < 1) fail("bad_params", "stopping threshold must be positive");
  if (!(dt > 0.0) || !(dt <= 1.0)) fail("bad_params", "dt must lie in (0, 1]");
  if (stall_window < 1) fail("bad_params", "stall window must be positive");
  if (!(resume_fraction > 0.0) || !(resume_fraction <= 1.0))
    fail("bad_params", "resume fraction must lie in (0, 1]");
  if (!(t >= 0.0) || !(t <= 1.0)) fail("bad_params", "t must lie in [0, 1]");
}

OptimizeOutcome optimize_reducer(ActivationController& controller, EsState& es,
                                 std::uint64_t budget, Rng& rng) {
  controller.validate();
  OptimizeOutcome outcome;
  outcome.theta = es.mean();
  outcome.best.value = std::numeric_limits<double>::infinity();

  const auto lambda = std::uint64_t(es.lambda());
  const LossFn loss_fn = [&controller](std::span<const double> theta, Rng& eval) {
    return loss(theta, controller.t, controller.context, eval);
  };

  bool hit_threshold = false;
  int since_improvement = 0;
  bool have_best = false;
  while (outcome.evaluations + lambda <= budget) {
    const EsStepResult step = es_step(es, loss_fn, rng);
    outcome.evaluations += lambda;
    outcome.generations += 1;

    TrajectoryRow row;
    row.instance_id = controller.instance_id;
    row.phase = "optimize";
    row.t = controller.t;
    row.generation = es.generation();
    row.K = step.best.loss.K;
    row.p = step.best.loss.p;
    row.loss = step.best.loss.value;
    row.estimable = step.best.loss.estimable;
    controller.history.push_back(row);

    const bool improved = !have_best || step.best.loss.value < outcome.best.value;
    if (improved) {
      outcome.best = step.best.loss;
      outcome.theta = step.best.theta;
      have_best = true;
      since_improvement = 0;
    } else {
      since_improvement += 1;
    }
    if (have_best && outcome.best.K <= controller.resume_threshold()) {
      hit_threshold = true;
      outcome.exit = OptExit::kThreshold;
      break;
    }
    if (since_improvement >= controller.stall_window) {
      outcome.exit = OptExit::kStall;
      break;
    }
  }

  outcome.failed =
      !hit_threshold && (!have_best || outcome.best.K >= controller.cb_threshold);
  return outcome;
}

void ActivationProblem::validate() const {
  context.validate();
  if (cb_threshold < 1) fail("bad_params", "stopping threshold must be positive");
  if (!(dt > 0.0) || !(dt <= 1.0)) fail("bad_params", "dt must lie in (0, 1]");
  if (periodic_generations < 1)
    fail("bad_params", "parametric passes need at least one generation");
  if (sigma0 < 0.0) fail("bad_params", "initial step size must be nonnegative");
  if (stall_window < 1) fail("bad_params", "stall window must be positive");
  if (!(resume_fraction > 0.0) || !(resume_fraction <= 1.0))
    fail("bad_params", "resume fraction must lie in (0, 1]");
  if (context.reducer_params < 1)
    fail("bad_params", "the reducer needs at least one parameter");
}

nlohmann::json ExperimentRecord::to_json() const {
  nlohmann::json j{{"theta_star", theta_star},
                   {"success", success},
                   {"final_k", final_k},
                   {"final_p", final_p},
                   {"final_estimable", final_estimable},
                   {"fidelity", fidelity},
                   {"bound", bound},
                   {"bound_confidence", bound_confidence},
                   {"optimizer_invocations", optimizer_invocations},
                   {"loss_evaluations", loss_evaluations}};
  j["reconstructed"] = reconstructed ? reconstructed->to_json() : nlohmann::json();
  return j;
}

namespace {

struct RunScratch {
  ActivationController controller;
  std::vector<double> theta;
  ExperimentRecord record;
  const ActivationProblem* problem = nullptr;

  double sigma0() const {
    return problem->sigma0 > 0.0 ? problem->sigma0 : problem->context.eps;
  }

  void record_estimate(const LossValue& lv, const char* phase) {
    TrajectoryRow row;
    row.instance_id = controller.instance_id;
    row.phase = phase;
    row.t = controller.t;
    row.generation = 0;
    row.K = lv.K;
    row.p = lv.p;
    row.loss = lv.value;
    row.estimable = lv.estimable;
    controller.history.push_back(row);
  }

  LossValue estimate_here(Rng& rng) {
    const LossValue lv = loss(theta, controller.t, controller.context, rng);
    record_estimate(lv, "activate");
    return lv;
  }

  // A full-budget optimization pass from the current theta. Returns false
  // when the pass exhausts its budget with the rank still at the threshold.
  bool full_pass(Rng& rng) {
    EsState es(theta, sigma0());
    const OptimizeOutcome outcome =
        optimize_reducer(controller, es, problem->optimize_budget, rng);
    theta = outcome.theta;
    record.optimizer_invocations += 1;
    record.loss_evaluations += outcome.evaluations;
    return !outcome.failed;
  }

  void periodic_pass(Rng& rng) {
    EsState es(theta, sigma0());
    const auto budget =
        std::uint64_t(problem->periodic_generations) * std::uint64_t(es.lambda());
    const OptimizeOutcome outcome = optimize_reducer(controller, es, budget, rng);
    theta = outcome.theta;
    record.optimizer_invocations += 1;
    record.loss_evaluations += outcome.evaluations;
  }
};

}  // namespace

ExperimentRecord run_activation(const ActivationProblem& problem, Rng& rng) {
  problem.validate();

  RunScratch run;
  run.problem = &problem;
  run.controller.schedule = problem.context.schedule;
  run.controller.dt = problem.dt;
  run.controller.cb_threshold = problem.cb_threshold;
  run.controller.stall_window = problem.stall_window;
  run.controller.resume_fraction = problem.resume_fraction;
  run.controller.instance_id = problem.instance_id;
  run.controller.context = problem.context;
  run.theta.assign(problem.context.reducer_params, 0.0);

  bool aborted = false;
  LossValue lv = run.estimate_here(rng);
  if (lv.K >= problem.cb_threshold && !run.full_pass(rng)) aborted = true;

  if (!aborted && run.controller.schedule == ActivationSchedule::kSoft) {
    // Sweep t upward; on a rank jump of more than 2x, refine the step for
    // the rest of the sweep (floor dt/32) to walk the discontinuity slowly.
    double step = problem.dt;
    int prev_k = lv.K;
    while (run.controller.t < 1.0) {
      run.controller.t = std::min(1.0, run.controller.t + step);
      lv = run.estimate_here(rng);
      if (lv.K > 2 * prev_k) step = std::max(step / 2.0, problem.dt / 32.0);
      prev_k = lv.K;
      if (lv.K >= problem.cb_threshold && !run.full_pass(rng)) {
        aborted = true;
        break;
      }
    }
  } else if (!aborted) {
    const auto total = problem.context.phi.size();
    for (std::size_t active = 1; active <= total; ++active) {
      run.controller.t = double(active) / double(total);
      lv = run.estimate_here(rng);
      if (lv.K >= problem.cb_threshold) {
        if (!run.full_pass(rng)) {
          aborted = true;
          break;
        }
      } else {
        // Polish pass after each activation; running out of budget here is
        // not a failure, the threshold was never breached.
        run.periodic_pass(rng);
      }
    }
  }

  // Final certification at the level reached: estimate, optionally one last
  // optimization pass, then re-estimate for the record.
  CBEstimate final_est =
      estimate_at(run.theta, run.controller.t, problem.context, rng);
  run.record_estimate(LossValue::from_estimate(final_est), "activate");
  if (!aborted && final_est.K > run.controller.resume_threshold()) {
    if (!run.full_pass(rng)) aborted = true;
    final_est = estimate_at(run.theta, run.controller.t, problem.context, rng);
    run.record_estimate(LossValue::from_estimate(final_est), "activate");
  }

  ExperimentRecord& record = run.record;
  record.theta_star = run.theta;
  record.final_k = final_est.K;
  record.final_p = final_est.p;
  record.final_estimable = final_est.F;
  record.success = !aborted && final_est.F && final_est.K <= problem.cb_threshold &&
                   run.controller.t >= 1.0;

  // The certified reconstruction needs the fully activated first half as a
  // circuit, so it only runs for completed, certified instances.
  if (record.success) {
    const Circuit first_half =
        problem.context.build_u1(problem.context.phi)
            .then(problem.context.build_reducer(run.theta));
    const auto amplitudes = estimate_support_amplitudes(
        first_half, final_est, problem.amplitude_shots, rng);
    record.reconstructed = reconstruct_state(final_est, amplitudes);
    record.fidelity = fidelity(*record.reconstructed, run_circuit(first_half));
    record.bound = fidelity_lower_bound(problem.context.eps, final_est.K,
                                        problem.amplitude_shots == kExactShots
                                            ? std::uint64_t{1} << 40
                                            : problem.amplitude_shots,
                                        final_est.m, final_est.M);
    record.bound_confidence =
        1.0 - hoeffding_bound(final_est.M, problem.context.eps, double(final_est.m));
  }
  record.trajectory = std::move(run.controller.history);
  return record;
}

int default_cb_threshold(int n) {
  if (n < 1) fail("bad_params", "qubit count must be positive");
  return n * n * n / 5;
}

std::uint64_t default_probability_shots(int n, double eps) {
  if (n < 1) fail("bad_params", "qubit count must be positive");
  if (!(eps > 0.0) || !(eps < 1.0)) fail("bad_params", "eps must lie in (0, 1)");
  return std::uint64_t(std::ceil((1.0 / (eps * eps)) * double(n) * n * n / 4.0));
}

}  // namespace reducechop
