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

#include "dripalm/subsolvers.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace dripalm {
namespace {

// Gradient of the smooth part at every block; optionally keeps local values.
void smooth_gradient(const CompositeOracle& oracle, const StackedVector& x,
                     const StackedVector& zx, StackedVector& grad,
                     std::vector<double>* values) {
  if (!grad.same_shape(x)) grad = StackedVector(x.agents(), x.dim());
  if (values) values->assign(x.agents(), 0.0);
  for (int i = 0; i < x.agents(); ++i) {
    double v = oracle.smooth(i, x.block(i), zx.block(i), grad.block(i));
    if (values) (*values)[i] = v;
  }
}

}  // namespace

StackedVector compute_delta(const CompositeOracle& oracle, const StackedVector& x,
                            const StackedVector& zx,
                            const StackedVector* prox_correction) {
  StackedVector delta;
  smooth_gradient(oracle, x, zx, delta, nullptr);
  if (prox_correction) delta += *prox_correction;
  return delta;
}

double next_momentum(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

bool momentum_reset_policy(double previous_objective, double current_objective) {
  return current_objective > previous_objective;
}

bool gradient_reset_policy(double restart_product) { return restart_product > 0.0; }

AcceleratedProxGradient::AcceleratedProxGradient(SubsolverConfig config)
    : config_(config) {
  if (!(config_.step_rule.beta > 0.0 && config_.step_rule.beta < 1.0)) {
    throw std::invalid_argument("backtracking beta must be in (0, 1)");
  }
  if (!(config_.step_rule.initial_lipschitz > 0.0)) {
    throw std::invalid_argument("backtracking L0 must be positive");
  }
}

void AcceleratedProxGradient::start(const CompositeOracle& oracle,
                                    const StackedVector& x0,
                                    const StackedVector& zx0) {
  if (!x0.same_shape(zx0)) throw std::invalid_argument("x0 and Zx0 differ in shape");
  prev_x_ = x0;
  prev_zx_ = zx0;
  current_.x = x0;
  current_.zx = zx0;
  current_.delta = StackedVector(x0.agents(), x0.dim());
  current_.objective_parts.assign(x0.agents(), 0.0);
  current_.restart_parts.assign(x0.agents(), 0.0);
  current_.disagreement_parts.clear();
  t_ = 1.0;
  beta_ = 0.0;
  last_objective_.reset();
  iterations_ = 0;

  const auto known = oracle.lipschitz();
  switch (config_.step_rule.kind) {
    case StepRule::Kind::kAuto:
      backtracking_ = !known.has_value();
      break;
    case StepRule::Kind::kFixed:
      if (!known) throw std::invalid_argument("fixed step needs a Lipschitz bound");
      backtracking_ = false;
      break;
    case StepRule::Kind::kBacktracking:
      backtracking_ = true;
      break;
  }
  lipschitz_ = backtracking_ ? config_.step_rule.initial_lipschitz : *known;
  if (!(lipschitz_ > 0.0)) throw std::invalid_argument("Lipschitz bound must be > 0");
}

void AcceleratedProxGradient::gradient_at(const CompositeOracle& oracle,
                                          const StackedVector& y,
                                          const StackedVector& zy,
                                          StackedVector& grad,
                                          std::vector<double>* values) const {
  smooth_gradient(oracle, y, zy, grad, values);
}

void AcceleratedProxGradient::prox_step(const CompositeOracle& oracle,
                                        const StackedVector& y,
                                        const StackedVector& grad, double step,
                                        StackedVector& forward,
                                        StackedVector& out) const {
  forward = y;
  forward.matrix() -= step * grad.matrix();
  if (!out.same_shape(y)) out = StackedVector(y.agents(), y.dim());
  if (!oracle.has_nonsmooth()) {
    out = forward;
    return;
  }
  for (int i = 0; i < y.agents(); ++i) {
    oracle.prox(i, forward.block(i), step, out.block(i));
  }
}

const InnerIterate& AcceleratedProxGradient::step(const CompositeOracle& oracle,
                                                  SimNetwork& net) {
  // Extrapolated point and its Zx, formed locally by linearity.
  StackedVector y = current_.x;
  StackedVector zy = current_.zx;
  if (beta_ != 0.0) {
    y.matrix() += beta_ * (current_.x.matrix() - prev_x_.matrix());
    zy.matrix() += beta_ * (current_.zx.matrix() - prev_zx_.matrix());
  }

  StackedVector grad_y;
  std::vector<double> values_y;
  gradient_at(oracle, y, zy, grad_y, backtracking_ ? &values_y : nullptr);

  StackedVector forward;
  StackedVector x_next;
  StackedVector zx_next;
  StackedVector grad_next;
  std::vector<double> values_next;
  std::vector<double> disagreement;
  double step = 0.0;
  for (;;) {
    step = 1.0 / lipschitz_;
    prox_step(oracle, y, grad_y, step, forward, x_next);
    zx_next = net.exchange_apply_Z(x_next, &disagreement);
    gradient_at(oracle, x_next, zx_next, grad_next, &values_next);
    if (!backtracking_) break;

    // Sufficient decrease of the smooth part, summed over agents.
    std::vector<std::array<double, 2>> parts(y.agents());
    for (int i = 0; i < y.agents(); ++i) {
      auto diff = x_next.block(i) - y.block(i);
      parts[i] = {values_next[i] - values_y[i] - grad_y.block(i).dot(diff) -
                      0.5 * lipschitz_ * diff.squaredNorm(),
                  std::abs(values_y[i])};
    }
    auto total = net.scalar_allreduce(parts);
    if (total[0] <= 1e-12 * (1.0 + total[1])) break;
    lipschitz_ /= config_.step_rule.beta;
  }

  for (int i = 0; i < y.agents(); ++i) {
    current_.restart_parts[i] =
        (y.block(i) - x_next.block(i)).dot(x_next.block(i) - current_.x.block(i));
  }
  prev_x_ = std::move(current_.x);
  prev_zx_ = std::move(current_.zx);
  current_.x = std::move(x_next);
  current_.zx = std::move(zx_next);
  current_.delta = std::move(grad_next);
  if (oracle.has_nonsmooth()) {
    // Canonical subgradient of h at x+ = prox(forward): (forward - x+) / step.
    current_.delta.matrix() += (forward.matrix() - current_.x.matrix()) / step;
  }
  current_.disagreement_parts = std::move(disagreement);
  current_.objective_parts = std::move(values_next);
  if (oracle.has_nonsmooth()) {
    for (int i = 0; i < current_.x.agents(); ++i) {
      current_.objective_parts[i] += oracle.nonsmooth_value(i, current_.x.block(i));
    }
  }

  ++iterations_;
  if (config_.kind == SubsolverKind::kFista) {
    const double t_next = next_momentum(t_);
    beta_ = (t_ - 1.0) / t_next;
    t_ = t_next;
  } else {
    beta_ = 0.0;
  }
  return current_;
}

void AcceleratedProxGradient::observe(const InnerFeedback& feedback) {
  bool reset = false;
  switch (config_.restart) {
    case RestartRule::kNone:
      break;
    case RestartRule::kFunctionValue:
      reset = last_objective_ && momentum_reset_policy(*last_objective_, feedback.objective);
      break;
    case RestartRule::kGradient:
      reset = gradient_reset_policy(feedback.restart_product);
      break;
  }
  if (config_.kind == SubsolverKind::kFista && reset) {
    t_ = 1.0;
    beta_ = 0.0;
    ++restarts_;
  }
  last_objective_ = feedback.objective;
}

std::unique_ptr<InnerSolver> make_subsolver(const SubsolverConfig& config) {
  return std::make_unique<AcceleratedProxGradient>(config);
}

std::optional<double> lipschitz_bound(const ProblemInstance& problem, double sigma,
                                      double tau, const SpectralReport& spectral) {
  if (!(sigma > 0.0) || tau < 0.0) {
    throw std::invalid_argument("lipschitz_bound needs sigma > 0 and tau >= 0");
  }
  auto local = problem.max_lipschitz();
  if (!local) return std::nullopt;
  return *local + sigma * spectral.lambda_max_z + tau / sigma;
}

}  // namespace dripalm
