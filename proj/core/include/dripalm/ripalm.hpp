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

// Decentralized relative-type inexact proximal ALM. Each outer iteration
// approximately minimizes
//   Psi_k(x) = F(x) + <Omega, x> + (sigma/2) <x, Zx> + (tau/(2 sigma)) ||x - x^k||^2
// with an inner solver, stopping as soon as the aggregated E-stacks satisfy
//   2 |sum E1| + sum E2 <= rho * sum E3.
// The multiplier is kept in transformed form Omega = sqrt(Z) y, so sqrt(Z) is
// never formed.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <stdexcept>
#include <vector>

#include "dripalm/objectives.hpp"
#include "dripalm/simnet.hpp"
#include "dripalm/solve_result.hpp"
#include "dripalm/subsolvers.hpp"

namespace dripalm {

/// sigma_k = min(1.5^k, 1e4).
double default_sigma(int k);
/// tau_k = 1e-3.
double default_tau(int k);
/// Resets w to the new iterate at k = 0..3, at even k in 4..10, then at
/// k = 11, 14, 17, ...
bool restart_decision(int k);

struct DripalmConfig {
  double rho = 0.99;
  std::function<double(int)> sigma = default_sigma;
  std::function<double(int)> tau = default_tau;
  std::function<bool(int)> restart = restart_decision;
  int max_outer = 200;
  std::int64_t max_total_comm = 30000;
  double kkt_tol = 1e-6;
  SubsolverConfig subsolver;  // max_inner is the per-outer inner cap
  bool record_iterates = false;
  std::optional<StackedVector> x0;  // zero when absent
};

/// Throws std::invalid_argument on rho outside [0, 1) or bad limits.
void validate(const DripalmConfig& config);

/// Smooth part, prox and Lipschitz bound of Psi_k, block by block.
class SubproblemOracle final : public CompositeOracle {
 public:
  SubproblemOracle(const ProblemInstance& problem, const StackedVector& omega,
                   const StackedVector& anchor, double sigma, double tau,
                   std::optional<double> lipschitz);

  int agents() const override { return problem_->agents; }
  int dim() const override { return problem_->dim; }
  double smooth(int agent, ConstBlock x, ConstBlock zx, MutableBlock grad) const override;
  bool has_nonsmooth() const override { return !problem_->smooth(); }
  double nonsmooth_value(int agent, ConstBlock x) const override;
  void prox(int agent, ConstBlock v, double step, MutableBlock out) const override;
  std::optional<double> lipschitz() const override { return lipschitz_; }

  double sigma() const { return sigma_; }
  double tau() const { return tau_; }

 private:
  const ProblemInstance* problem_;
  const StackedVector* omega_;
  const StackedVector* anchor_;
  double sigma_;
  double tau_;
  std::optional<double> lipschitz_;
};

/// Builds the Psi_k oracle for the given state pieces with
/// L_k = max_i L_i + sigma lambda_max(Z) + tau / sigma when available.
SubproblemOracle subproblem_oracle(const ProblemInstance& problem,
                                   const StackedVector& omega,
                                   const StackedVector& anchor, double sigma,
                                   double tau, const SimNetwork& net);

struct EStack {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

/// Agent i's contribution:
///   E1 = <w_i - x_i+, sigma Delta_i>, E2 = ||sigma Delta_i||^2,
///   E3 = sigma^2 <x_i+, [Zx+]_i> + tau ||x_i+ - x_i^k||^2.
EStack local_estack(ConstBlock w, ConstBlock anchor, ConstBlock x, ConstBlock zx,
                    ConstBlock delta, double sigma, double tau);

/// Same stack with <x_i+, [Zx+]_i> replaced by the agent's disagreement share
/// (1/2) sum_j w_ij ||x_i+ - x_j+||^2. The shares have the same network sum
/// but stay nonnegative and accurate near consensus, where the inner products
/// lose all significant digits.
EStack local_estack(ConstBlock w, ConstBlock anchor, ConstBlock x, double disagreement,
                    ConstBlock delta, double sigma, double tau);

/// The network-wide test on summed stacks.
bool criterion_holds(const EStack& total, double rho);

/// Aggregates the stacks with a single scalar allreduce and applies the test.
bool check_criterion(double rho, double sigma, double tau, const StackedVector& w,
                     const StackedVector& anchor, const StackedVector& x,
                     const StackedVector& zx, const StackedVector& delta,
                     SimNetwork& net);

struct SolverState {
  int k = 0;
  StackedVector x;      // x^k
  StackedVector w;      // w^k
  StackedVector omega;  // Omega^k
  StackedVector zx;     // Z x^k, cached from the accepting inner step
  std::vector<double> disagreement;  // shares of <x^k, Z x^k>, same source
};

/// Raised when the inner loop reaches its cap without passing the criterion.
class InnerCapError : public std::runtime_error {
 public:
  InnerCapError(double rho, int k, int inner)
      : std::runtime_error(message(rho, k, inner)), rho_(rho), k_(k), inner_(inner) {}
  double rho() const { return rho_; }
  int outer() const { return k_; }
  int inner() const { return inner_; }

 private:
  static std::string message(double rho, int k, int inner);
  double rho_;
  int k_;
  int inner_;
};

struct OuterStep {
  bool accepted = false;     // false only when the comm budget ran out
  int inner_iters = 0;
  double sigma = 0.0;
  double tau = 0.0;
  EStack totals;
  StackedVector delta;       // Delta^{k+1} of the last candidate
  StackedVector previous_x;  // x^k
};

/// One pass of the outer loop. Runs the inner solver from x^k, tests the
/// criterion after each inner step and, on acceptance, updates Omega, w and x
/// in place. Once `comm_limit` vector rounds have been charged the loop stops,
/// the state stays at x^k and the last candidate is copied to `candidate`.
OuterStep outer_iteration(SolverState& state, const ProblemInstance& problem,
                          SimNetwork& net, InnerSolver& solver,
                          const DripalmConfig& config,
                          std::int64_t comm_limit = INT64_MAX,
                          InnerIterate* candidate = nullptr);

/// Full run. Uses `solver` when given (an exact solver permits rho = 0),
/// otherwise the configured iterative subsolver.
SolveResult run_dripalm(const DripalmConfig& config, const ProblemInstance& problem,
                        SimNetwork& net, InnerSolver* solver = nullptr);

}  // namespace dripalm
