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

// Decentralized inner solvers for composite subproblems
//   min_x  sum_i s_i(x_i, [Zx]_i) + h_i(x_i)
// where the smooth part may couple neighbors only through Zx. Each inner
// iteration exchanges the new iterate once; the Zx of the extrapolated point
// is formed locally from the two most recent exchanges since Z is linear.

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "dripalm/netgraph.hpp"
#include "dripalm/objectives.hpp"
#include "dripalm/simnet.hpp"
#include "dripalm/stacked_vector.hpp"

namespace dripalm {

/// Block-separable access to a composite objective. Every method touches a
/// single agent's data plus that agent's [Zx]_i.
class CompositeOracle {
 public:
  virtual ~CompositeOracle() = default;

  virtual int agents() const = 0;
  virtual int dim() const = 0;
  /// Writes grad_i of the smooth part at x and returns its local value.
  virtual double smooth(int agent, ConstBlock x, ConstBlock zx,
                        MutableBlock grad) const = 0;
  virtual bool has_nonsmooth() const = 0;
  virtual double nonsmooth_value(int agent, ConstBlock x) const = 0;
  virtual void prox(int agent, ConstBlock v, double step,
                    MutableBlock out) const = 0;
  /// Global Lipschitz bound of the smooth gradient, if one is known.
  virtual std::optional<double> lipschitz() const = 0;
};

/// Error term of a candidate: grad s(x) plus, after a prox step, the
/// canonical subgradient (v - x) / step of h at x = prox(v). Local only.
StackedVector compute_delta(const CompositeOracle& oracle, const StackedVector& x,
                            const StackedVector& zx,
                            const StackedVector* prox_correction);

/// One inner iterate and what the outer loop needs to test it.
struct InnerIterate {
  StackedVector x;
  StackedVector zx;
  StackedVector delta;
  /// Local shares (1/2) sum_j w_ij ||x_i - x_j||^2 of <x, Zx> from the same
  /// exchange that produced zx.
  std::vector<double> disagreement_parts;
  /// Local values s_i(x_i) + h_i(x_i), for aggregation by the caller.
  std::vector<double> objective_parts;
  /// Local <y_i - x_i, x_i - x_prev_i> at the extrapolated point y; a positive
  /// sum means the momentum points uphill.
  std::vector<double> restart_parts;
};

/// Network-wide sums the caller feeds back after each step.
struct InnerFeedback {
  double objective = 0.0;
  double restart_product = 0.0;
};

class InnerSolver {
 public:
  virtual ~InnerSolver() = default;

  /// Warm start at x0 whose Zx0 is already known (no communication).
  virtual void start(const CompositeOracle& oracle, const StackedVector& x0,
                     const StackedVector& zx0) = 0;
  /// Advances one iteration. With a fixed step this costs exactly one
  /// neighbor exchange.
  virtual const InnerIterate& step(const CompositeOracle& oracle,
                                   SimNetwork& net) = 0;
  /// Aggregated values at the last iterate, fed back by the caller once they
  /// have been summed over the network.
  virtual void observe(const InnerFeedback& /*feedback*/) {}
  /// True when step() returns an exact minimizer.
  virtual bool exact() const { return false; }
};

enum class SubsolverKind { kFista, kProxGrad };

struct StepRule {
  enum class Kind { kAuto, kFixed, kBacktracking };
  Kind kind = Kind::kAuto;     // fixed 1/L when the oracle knows L
  double beta = 0.5;           // backtracking shrink factor for the step
  double initial_lipschitz = 1.0;
};

enum class RestartRule {
  kNone,
  kFunctionValue,  // reset when the aggregated objective goes up
  kGradient,       // reset when <y - x+, x+ - x> > 0
};

struct SubsolverConfig {
  SubsolverKind kind = SubsolverKind::kFista;
  StepRule step_rule;
  int max_inner = 5000;
  RestartRule restart = RestartRule::kGradient;
};

/// t_{j+1} = (1 + sqrt(1 + 4 t_j^2)) / 2.
double next_momentum(double t);

/// Function-value restart test: reset when the composite objective went up.
bool momentum_reset_policy(double previous_objective, double current_objective);

/// Gradient restart test: reset when the step x+ - x makes an acute angle with
/// the gradient-mapping direction y - x+.
bool gradient_reset_policy(double restart_product);

/// FISTA, or plain proximal gradient when kind == kProxGrad.
class AcceleratedProxGradient final : public InnerSolver {
 public:
  explicit AcceleratedProxGradient(SubsolverConfig config = {});

  void start(const CompositeOracle& oracle, const StackedVector& x0,
             const StackedVector& zx0) override;
  const InnerIterate& step(const CompositeOracle& oracle, SimNetwork& net) override;
  void observe(const InnerFeedback& feedback) override;

  double momentum() const { return t_; }
  int restarts() const { return restarts_; }
  int iterations() const { return iterations_; }
  double current_lipschitz() const { return lipschitz_; }

 private:
  void gradient_at(const CompositeOracle& oracle, const StackedVector& y,
                   const StackedVector& zy, StackedVector& grad,
                   std::vector<double>* values) const;
  void prox_step(const CompositeOracle& oracle, const StackedVector& y,
                 const StackedVector& grad, double step, StackedVector& forward,
                 StackedVector& out) const;

  SubsolverConfig config_;
  StackedVector prev_x_;
  StackedVector prev_zx_;
  InnerIterate current_;
  double t_ = 1.0;
  double beta_ = 0.0;
  double lipschitz_ = 0.0;
  std::optional<double> last_objective_;
  int restarts_ = 0;
  int iterations_ = 0;
  bool backtracking_ = false;
};

std::unique_ptr<InnerSolver> make_subsolver(const SubsolverConfig& config);

/// L_k = max_i L_i + sigma * lambda_max(Z) + tau / sigma, or nullopt when a
/// local hint is missing (callers then fall back to backtracking).
std::optional<double> lipschitz_bound(const ProblemInstance& problem, double sigma,
                                      double tau, const SpectralReport& spectral);

}  // namespace dripalm
