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

#include "dripalm/baselines.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "dripalm/metrics.hpp"
#include "dripalm/ripalm.hpp"

namespace dripalm {
namespace {

double default_step(const ProblemInstance& problem, double scale) {
  const auto l = problem.max_lipschitz();
  if (!l || !(*l > 0.0)) {
    throw std::invalid_argument("a step size is required when Lipschitz hints are missing");
  }
  return scale / *l;
}

void smooth_gradients(const ProblemInstance& problem, const StackedVector& x,
                      StackedVector& grad) {
  for (int i = 0; i < x.agents(); ++i) problem.locals[i].smooth(x.block(i), grad.block(i));
}

void prox_all(const ProblemInstance& problem, const StackedVector& v, double step,
              StackedVector& out) {
  for (int i = 0; i < v.agents(); ++i) problem.locals[i].prox(v.block(i), step, out.block(i));
}

void require_sizes(const ProblemInstance& problem, const SimNetwork& net) {
  if (net.agents() != problem.agents || net.dim() != problem.dim) {
    throw std::invalid_argument("network and problem sizes differ");
  }
}

// Shared bookkeeping for the single-loop methods: periodic stopping tests,
// the communication cap and the divergence guard.
class SingleLoopMonitor {
 public:
  SingleLoopMonitor(const ProblemInstance& problem, SimNetwork& net,
                    const BaselineConfig& config)
      : problem_(problem), net_(net), config_(config),
        base_(net.comm_report().vector_rounds),
        base_scalar_(net.comm_report().scalar_rounds) {}

  std::int64_t rounds() const { return net_.comm_report().vector_rounds - base_; }

  // Returns true when the run should stop after `iter` iterations at x.
  bool done(int iter, const StackedVector& x) {
    if (!std::isfinite(x.norm()) || x.norm() > config_.divergence_bound) {
      status_ = SolveStatus::kDiverged;
      return true;
    }
    const bool capped = rounds() >= config_.max_comm;
    if (iter % config_.check_every == 0 || capped) {
      last_ = evaluate_kkt(x, nullptr, problem_, net_);
      history_.push_back(last_.kkt);
      if (last_.kkt <= config_.kkt_tol) {
        status_ = SolveStatus::kConverged;
        return true;
      }
    }
    if (capped) {
      status_ = SolveStatus::kCommBudget;
      return true;
    }
    return false;
  }

  SolveResult finish(StackedVector x, int iters) {
    SolveResult r;
    if (status_ == SolveStatus::kDiverged) {
      r.message = "iterate norm exceeded the divergence bound";
    }
    r.x = std::move(x);
    r.status = status_;
    r.outer_iters = iters;
    r.inner_iters = iters;
    const CommStats end = net_.comm_report();
    r.vector_rounds = end.vector_rounds - base_;
    r.scalar_rounds = end.scalar_rounds - base_scalar_;
    r.final_kkt = last_;
    r.kkt_history = std::move(history_);
    return r;
  }

 private:
  const ProblemInstance& problem_;
  SimNetwork& net_;
  const BaselineConfig& config_;
  std::int64_t base_;
  std::int64_t base_scalar_;
  SolveStatus status_ = SolveStatus::kMaxOuter;
  KktReport last_;
  std::vector<double> history_;
};

}  // namespace

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kPgExtra:
      return "pg_extra";
    case BaselineKind::kNids:
      return "nids";
    case BaselineKind::kIdeal:
      return "ideal";
  }
  return "unknown";
}

void validate(const BaselineConfig& config) {
  if (config.step && !(*config.step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (!(config.kkt_tol >= 0.0)) throw std::invalid_argument("kkt_tol must be >= 0");
  if (config.max_comm <= 0) throw std::invalid_argument("max_comm must be > 0");
  if (config.check_every <= 0) throw std::invalid_argument("check_every must be > 0");
  if (!(config.divergence_bound > 0.0)) {
    throw std::invalid_argument("divergence bound must be > 0");
  }
  if (config.kind == BaselineKind::kIdeal) {
    if (!(config.eps0 > 0.0)) throw std::invalid_argument("eps0 must be > 0");
    if (!(config.eps_decay > 0.0 && config.eps_decay < 1.0)) {
      throw std::invalid_argument("eps decay must lie in (0, 1)");
    }
    if (config.strong_convexity && !(*config.strong_convexity > 0.0)) {
      throw std::invalid_argument("strong convexity modulus must be > 0");
    }
    if (config.max_outer < 0) throw std::invalid_argument("max_outer must be >= 0");
  }
}

bool ideal_criterion(double grad_norm_sq, double strong_convexity, double eps) {
  return grad_norm_sq / (strong_convexity * strong_convexity) <= eps;
}

SolveResult pg_extra_run(const ProblemInstance& problem, SimNetwork& net,
                         const BaselineConfig& config) {
  validate(config);
  require_sizes(problem, net);
  SimNetwork::SolverScope label(net, "pg_extra");
  const double alpha = config.step.value_or(default_step(problem, 0.5));
  const int n = problem.agents;
  const int d = problem.dim;

  // x^0 = 0 is a consensus point, so W x^0 = 0 needs no exchange.
  StackedVector x_prev(n, d), wx_prev(n, d), g_prev(n, d);
  smooth_gradients(problem, x_prev, g_prev);
  StackedVector half = wx_prev - alpha * g_prev;
  StackedVector x(n, d);
  prox_all(problem, half, alpha, x);

  SingleLoopMonitor monitor(problem, net, config);
  StackedVector g(n, d);
  int iter = 1;
  while (!monitor.done(iter, x)) {
    StackedVector wx = net.exchange_apply_W(x);
    smooth_gradients(problem, x, g);
    // x^{k+3/2} = W x^{k+1} + x^{k+1/2} - (x^k + W x^k)/2 - alpha (g^{k+1} - g^k)
    half.matrix() += wx.matrix() - 0.5 * (x_prev.matrix() + wx_prev.matrix()) -
                     alpha * (g.matrix() - g_prev.matrix());
    x_prev = x;
    wx_prev = std::move(wx);
    g_prev = g;
    prox_all(problem, half, alpha, x);
    ++iter;
  }
  return monitor.finish(std::move(x), iter);
}

SolveResult nids_run(const ProblemInstance& problem, SimNetwork& net,
                     const BaselineConfig& config) {
  validate(config);
  require_sizes(problem, net);
  SimNetwork::SolverScope label(net, "nids");
  const double alpha = config.step.value_or(default_step(problem, 1.0));
  const double c = 1.0 / net.spectral().lambda_max_z;
  const int n = problem.agents;
  const int d = problem.dim;

  StackedVector x_prev(n, d), g_prev(n, d);
  smooth_gradients(problem, x_prev, g_prev);
  StackedVector z = x_prev - alpha * g_prev;
  StackedVector x(n, d);
  prox_all(problem, z, alpha, x);

  SingleLoopMonitor monitor(problem, net, config);
  StackedVector g(n, d);
  int iter = 1;
  while (!monitor.done(iter, x)) {
    smooth_gradients(problem, x, g);
    // z^{k+1} = z^k - x^k + Wt (2x^k - x^{k-1} - alpha (g^k - g^{k-1})),
    // Wt = I - c (I - W).
    StackedVector v = x;
    v.matrix() += x.matrix() - x_prev.matrix() - alpha * (g.matrix() - g_prev.matrix());
    StackedVector zv = net.exchange_apply_Z(v);
    z.matrix() += v.matrix() - c * zv.matrix() - x.matrix();
    x_prev = x;
    g_prev = g;
    prox_all(problem, z, alpha, x);
    ++iter;
  }
  return monitor.finish(std::move(x), iter);
}

SolveResult ideal_run(const ProblemInstance& problem, SimNetwork& net,
                      const BaselineConfig& config) {
  validate(config);
  require_sizes(problem, net);
  if (!problem.smooth()) {
    throw std::invalid_argument("the absolute-criterion ALM needs a smooth problem");
  }
  const auto mu = config.strong_convexity ? config.strong_convexity
                                          : problem.strong_convexity();
  if (!mu || !(*mu > 0.0)) {
    throw std::invalid_argument("the absolute-criterion ALM needs a strongly convex problem");
  }
  SimNetwork::SolverScope label(net, "ideal");
  const auto sigma_of = config.sigma ? config.sigma : std::function<double(int)>(default_sigma);
  const CommStats base = net.comm_report();
  const std::int64_t limit = base.vector_rounds + config.max_comm;
  const int n = problem.agents;
  const int d = problem.dim;

  StackedVector x(n, d), zx(n, d), omega(n, d);
  auto solver = make_subsolver(config.subsolver);

  SolveResult result;
  KktReport kkt = kkt_smooth(x, omega, problem, net);
  result.kkt_history.push_back(kkt.kkt);
  result.status = kkt.kkt <= config.kkt_tol ? SolveStatus::kConverged : SolveStatus::kMaxOuter;

  int k = 0;
  std::vector<std::array<double, 3>> parts(n);
  while (result.status != SolveStatus::kConverged && k < config.max_outer) {
    if (net.comm_report().vector_rounds >= limit) {
      result.status = SolveStatus::kCommBudget;
      break;
    }
    const double sigma = sigma_of(k);
    const double eps = config.eps0 * std::pow(config.eps_decay, k);
    const SubproblemOracle oracle = subproblem_oracle(problem, omega, x, sigma, 0.0, net);
    solver->start(oracle, x, zx);

    const InnerIterate* it = nullptr;
    int inner = 0;
    double grad_sq = 0.0;
    bool passed = false;
    while (!passed) {
      if (inner >= config.subsolver.max_inner) break;
      if (net.comm_report().vector_rounds >= limit) break;
      it = &solver->step(oracle, net);
      ++inner;
      for (int i = 0; i < n; ++i) {
        parts[i] = {it->delta.block(i).squaredNorm(), it->objective_parts[i],
                    it->restart_parts[i]};
      }
      const auto total = net.scalar_allreduce(parts);
      grad_sq = total[0];
      solver->observe({total[1], total[2]});
      passed = ideal_criterion(grad_sq, *mu, eps);
    }
    result.inner_iters += inner;
    if (!passed) {
      result.status = inner >= config.subsolver.max_inner ? SolveStatus::kInnerCap
                                                          : SolveStatus::kCommBudget;
      if (result.status == SolveStatus::kInnerCap) {
        result.message = "inner loop hit its cap at outer iteration " + std::to_string(k);
      }
      if (it != nullptr) {
        StackedVector omega_try = omega;
        omega_try.matrix() += sigma * it->zx.matrix();
        x = it->x;
        omega = std::move(omega_try);
        kkt = kkt_smooth(x, omega, problem, net);
        result.kkt_history.push_back(kkt.kkt);
      }
      break;
    }

    omega.matrix() += sigma * it->zx.matrix();
    x = it->x;
    zx = it->zx;
    ++k;
    kkt = kkt_smooth(x, omega, problem, net);
    result.kkt_history.push_back(kkt.kkt);

    OuterRecord r;
    r.k = k;
    r.sigma = sigma;
    r.inner_iters = inner;
    r.norm_delta = std::sqrt(grad_sq);
    r.kkt = kkt.kkt;
    r.vector_rounds = net.comm_report().vector_rounds - base.vector_rounds;
    result.history.push_back(r);
    if (kkt.kkt <= config.kkt_tol) result.status = SolveStatus::kConverged;
  }

  const CommStats end = net.comm_report();
  result.x = std::move(x);
  result.omega = std::move(omega);
  result.outer_iters = k;
  result.vector_rounds = end.vector_rounds - base.vector_rounds;
  result.scalar_rounds = end.scalar_rounds - base.scalar_rounds;
  result.final_kkt = kkt;
  return result;
}

SolveResult run_baseline(const ProblemInstance& problem, SimNetwork& net,
                         const BaselineConfig& config) {
  switch (config.kind) {
    case BaselineKind::kPgExtra:
      return pg_extra_run(problem, net, config);
    case BaselineKind::kNids:
      return nids_run(problem, net, config);
    case BaselineKind::kIdeal:
      return ideal_run(problem, net, config);
  }
  throw std::invalid_argument("unknown baseline");
}

}  // namespace dripalm
