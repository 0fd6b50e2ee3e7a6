// Copyright 2026 The dripalm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dripalm/ripalm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "dripalm/metrics.hpp"

namespace dripalm {

double default_sigma(int k) { return std::min(std::pow(1.5, k), 1e4); }

double default_tau(int /*k*/) { return 1e-3; }

bool restart_decision(int k) {
  if (k < 0) throw std::invalid_argument("restart_decision needs k >= 0");
  if (k <= 3) return true;
  if (k <= 10) return k % 2 == 0;
  return (k - 11) % 3 == 0;
}

void validate(const DripalmConfig& config) {
  if (!(config.rho >= 0.0 && config.rho < 1.0)) {
    throw std::invalid_argument("rho must lie in [0, 1)");
  }
  if (!config.sigma || !config.tau || !config.restart) {
    throw std::invalid_argument("sigma, tau and restart schedules must be set");
  }
  if (config.max_outer < 0) throw std::invalid_argument("max_outer must be >= 0");
  if (config.max_total_comm <= 0) throw std::invalid_argument("max_total_comm must be > 0");
  if (!(config.kkt_tol >= 0.0)) throw std::invalid_argument("kkt_tol must be >= 0");
  if (config.subsolver.max_inner <= 0) throw std::invalid_argument("max_inner must be > 0");
}

std::string InnerCapError::message(double rho, int k, int inner) {
  std::ostringstream out;
  out << "inner loop hit its cap of " << inner << " iterations at outer iteration "
      << k << " without meeting the criterion (rho = " << rho << ")";
  return out.str();
}

SubproblemOracle::SubproblemOracle(const ProblemInstance& problem,
                                   const StackedVector& omega,
                                   const StackedVector& anchor, double sigma,
                                   double tau, std::optional<double> lipschitz)
    : problem_(&problem),
      omega_(&omega),
      anchor_(&anchor),
      sigma_(sigma),
      tau_(tau),
      lipschitz_(lipschitz) {
  if (!(sigma > 0.0) || !(tau >= 0.0)) {
    throw std::invalid_argument("sigma must be positive and tau nonnegative");
  }
  if (omega.agents() != problem.agents || omega.dim() != problem.dim ||
      !anchor.same_shape(omega)) {
    throw std::invalid_argument("subproblem data does not match the problem shape");
  }
}

double SubproblemOracle::smooth(int agent, ConstBlock x, ConstBlock zx,
                                MutableBlock grad) const {
  const double f = problem_->locals[agent].smooth(x, grad);
  const auto omega = omega_->block(agent);
  const auto anchor = anchor_->block(agent);
  const double ratio = tau_ / sigma_;
  grad += omega + sigma_ * zx + ratio * (x - anchor);
  return f + omega.dot(x) + 0.5 * sigma_ * x.dot(zx) +
         0.5 * ratio * (x - anchor).squaredNorm();
}

double SubproblemOracle::nonsmooth_value(int agent, ConstBlock x) const {
  return problem_->locals[agent].nonsmooth_value(x);
}

void SubproblemOracle::prox(int agent, ConstBlock v, double step,
                            MutableBlock out) const {
  problem_->locals[agent].prox(v, step, out);
}

SubproblemOracle subproblem_oracle(const ProblemInstance& problem,
                                   const StackedVector& omega,
                                   const StackedVector& anchor, double sigma,
                                   double tau, const SimNetwork& net) {
  return SubproblemOracle(problem, omega, anchor, sigma, tau,
                          lipschitz_bound(problem, sigma, tau, net.spectral()));
}

EStack local_estack(ConstBlock w, ConstBlock anchor, ConstBlock x, ConstBlock zx,
                    ConstBlock delta, double sigma, double tau) {
  EStack e;
  e.e1 = sigma * (w - x).dot(delta);
  e.e2 = sigma * sigma * delta.squaredNorm();
  e.e3 = sigma * sigma * x.dot(zx) + tau * (x - anchor).squaredNorm();
  return e;
}

EStack local_estack(ConstBlock w, ConstBlock anchor, ConstBlock x, double disagreement,
                    ConstBlock delta, double sigma, double tau) {
  EStack e;
  e.e1 = sigma * (w - x).dot(delta);
  e.e2 = sigma * sigma * delta.squaredNorm();
  e.e3 = sigma * sigma * disagreement + tau * (x - anchor).squaredNorm();
  return e;
}

bool criterion_holds(const EStack& total, double rho) {
  return 2.0 * std::abs(total.e1) + total.e2 <= rho * total.e3;
}

bool check_criterion(double rho, double sigma, double tau, const StackedVector& w,
                     const StackedVector& anchor, const StackedVector& x,
                     const StackedVector& zx, const StackedVector& delta,
                     SimNetwork& net) {
  std::vector<std::array<double, 3>> parts(x.agents());
  for (int i = 0; i < x.agents(); ++i) {
    const EStack e = local_estack(w.block(i), anchor.block(i), x.block(i),
                                  zx.block(i), delta.block(i), sigma, tau);
    parts[i] = {e.e1, e.e2, e.e3};
  }
  const auto total = net.scalar_allreduce(parts);
  return criterion_holds({total[0], total[1], total[2]}, rho);
}

namespace {

double local_part(const std::vector<double>& parts, int i) {
  return parts.empty() ? 0.0 : parts[static_cast<std::size_t>(i)];
}

}  // namespace

OuterStep outer_iteration(SolverState& state, const ProblemInstance& problem,
                          SimNetwork& net, InnerSolver& solver,
                          const DripalmConfig& config, std::int64_t comm_limit,
                          InnerIterate* candidate) {
  OuterStep out;
  out.sigma = config.sigma(state.k);
  out.tau = config.tau(state.k);
  if (!(out.sigma > 0.0) || !(out.tau > 0.0)) {
    throw std::invalid_argument("sigma_k and tau_k must be positive");
  }
  const SubproblemOracle oracle =
      subproblem_oracle(problem, state.omega, state.x, out.sigma, out.tau, net);

  solver.start(oracle, state.x, state.zx);
  const int n = state.x.agents();
  std::vector<std::array<double, 5>> parts(n);
  const InnerIterate* it = nullptr;
  bool passed = false;
  while (!passed) {
    if (out.inner_iters >= config.subsolver.max_inner) {
      throw InnerCapError(config.rho, state.k, out.inner_iters);
    }
    if (net.comm_report().vector_rounds >= comm_limit) break;
    it = &solver.step(oracle, net);
    ++out.inner_iters;

    // Criterion stacks and the solver's restart data travel in one allreduce.
    for (int i = 0; i < n; ++i) {
      const EStack e =
          it->disagreement_parts.empty()
              ? local_estack(state.w.block(i), state.x.block(i), it->x.block(i),
                             it->zx.block(i), it->delta.block(i), out.sigma, out.tau)
              : local_estack(state.w.block(i), state.x.block(i), it->x.block(i),
                             it->disagreement_parts[i], it->delta.block(i), out.sigma,
                             out.tau);
      parts[i] = {e.e1, e.e2, e.e3, local_part(it->objective_parts, i),
                  local_part(it->restart_parts, i)};
    }
    const auto total = net.scalar_allreduce(parts);
    out.totals = {total[0], total[1], total[2]};
    solver.observe({total[3], total[4]});
    passed = solver.exact() || criterion_holds(out.totals, config.rho);
  }

  if (it != nullptr) {
    out.delta = it->delta;
    if (candidate) *candidate = *it;
  }
  if (!passed) return out;

  out.accepted = true;
  out.previous_x = state.x;
  state.omega.matrix() += out.sigma * it->zx.matrix();
  if (config.restart(state.k)) {
    state.w = it->x;
  } else {
    state.w.matrix() -= out.sigma * it->delta.matrix();
  }
  state.x = it->x;
  state.zx = it->zx;
  state.disagreement = it->disagreement_parts;
  ++state.k;
  return out;
}

namespace {

OuterRecord diagnostics(const SolverState& state, const OuterStep& step,
                        const ProblemInstance& problem, SimNetwork& net) {
  SimNetwork::StoppingCheckScope scope(net);
  const double ratio = step.tau / step.sigma;
  std::vector<std::array<double, 4>> parts(state.x.agents());
  for (int i = 0; i < state.x.agents(); ++i) {
    const auto x = state.x.block(i);
    const auto delta = step.delta.block(i);
    Vector p = delta - ratio * (x - step.previous_x.block(i));
    const double share = state.disagreement.empty() ? x.dot(state.zx.block(i))
                                                    : state.disagreement[i];
    parts[i] = {delta.squaredNorm(), p.squaredNorm(), share, problem.locals[i].value(x)};
  }
  const auto total = net.scalar_allreduce(parts);
  OuterRecord r;
  r.k = state.k;
  r.sigma = step.sigma;
  r.tau = step.tau;
  r.inner_iters = step.inner_iters;
  r.norm_delta = std::sqrt(total[0]);
  r.norm_p = std::sqrt(total[1]);
  r.norm_u = std::sqrt(std::max(0.0, total[2]));
  r.objective = total[3];
  return r;
}

}  // namespace

SolveResult run_dripalm(const DripalmConfig& config, const ProblemInstance& problem,
                        SimNetwork& net, InnerSolver* solver) {
  validate(config);
  if (net.agents() != problem.agents || net.dim() != problem.dim) {
    throw std::invalid_argument("network and problem sizes differ");
  }
  std::unique_ptr<InnerSolver> owned;
  if (solver == nullptr) {
    owned = make_subsolver(config.subsolver);
    solver = owned.get();
  }
  if (config.rho == 0.0 && !solver->exact()) {
    throw std::invalid_argument("rho = 0 requires an exact subsolver");
  }

  SimNetwork::SolverScope label(net, "dripalm");
  const CommStats base = net.comm_report();
  const std::int64_t comm_limit = base.vector_rounds + config.max_total_comm;

  SolverState state;
  state.omega = StackedVector(problem.agents, problem.dim);
  if (config.x0) {
    if (!config.x0->same_shape(state.omega)) {
      throw std::invalid_argument("x0 does not match the problem shape");
    }
    state.x = *config.x0;
    state.zx = net.exchange_apply_Z(state.x, &state.disagreement);
  } else {
    // x^0 = 0 is a consensus point, so Z x^0 = 0 is known without an exchange.
    state.x = StackedVector(problem.agents, problem.dim);
    state.zx = StackedVector(problem.agents, problem.dim);
    state.disagreement.assign(static_cast<std::size_t>(problem.agents), 0.0);
  }
  state.w = state.x;

  SolveResult result;
  auto record = [&](const StackedVector& x, const StackedVector& omega) {
    if (config.record_iterates) {
      result.x_trace.push_back(x);
      result.omega_trace.push_back(omega);
    }
  };
  record(state.x, state.omega);

  KktReport kkt = evaluate_kkt(state.x, &state.omega, problem, net);
  result.kkt_history.push_back(kkt.kkt);
  result.status = SolveStatus::kMaxOuter;
  if (kkt.kkt <= config.kkt_tol) result.status = SolveStatus::kConverged;

  StackedVector final_x = state.x;
  StackedVector final_omega = state.omega;
  while (result.status != SolveStatus::kConverged && state.k < config.max_outer) {
    if (net.comm_report().vector_rounds >= comm_limit) {
      result.status = SolveStatus::kCommBudget;
      break;
    }
    InnerIterate candidate;
    OuterStep step;
    try {
      step = outer_iteration(state, problem, net, *solver, config, comm_limit, &candidate);
    } catch (const InnerCapError& e) {
      result.status = SolveStatus::kInnerCap;
      result.message = e.what();
      result.inner_iters += e.inner();
      break;
    }
    result.inner_iters += step.inner_iters;

    if (!step.accepted) {
      // Budget ran out mid-loop: report the last candidate with its would-be
      // multiplier.
      result.status = SolveStatus::kCommBudget;
      if (step.inner_iters > 0) {
        final_x = candidate.x;
        final_omega = state.omega;
        final_omega.matrix() += step.sigma * candidate.zx.matrix();
        kkt = evaluate_kkt(final_x, &final_omega, problem, net);
        result.kkt_history.push_back(kkt.kkt);
      }
      break;
    }

    OuterRecord r = diagnostics(state, step, problem, net);
    kkt = evaluate_kkt(state.x, &state.omega, problem, net);
    r.kkt = kkt.kkt;
    r.vector_rounds = net.comm_report().vector_rounds - base.vector_rounds;
    result.history.push_back(r);
    result.kkt_history.push_back(kkt.kkt);
    record(state.x, state.omega);
    final_x = state.x;
    final_omega = state.omega;
    if (kkt.kkt <= config.kkt_tol) result.status = SolveStatus::kConverged;
  }

  const CommStats end = net.comm_report();
  result.x = std::move(final_x);
  result.omega = std::move(final_omega);
  result.outer_iters = state.k;
  result.vector_rounds = end.vector_rounds - base.vector_rounds;
  result.scalar_rounds = end.scalar_rounds - base.scalar_rounds;
  result.final_kkt = kkt;
  return result;
}

}  // namespace dripalm
