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


#include <gtest/gtest.h>

#include <cmath>

#include "dripalm/ripalm.hpp"
#include "dripalm/subsolvers.hpp"
#include "oracles.hpp"

namespace dripalm {
namespace {

// Psi(x) = sum_i 0.5 ||x_i - target||^2 with no coupling; L = 1.
class DecoupledQuadratic final : public CompositeOracle {
 public:
  DecoupledQuadratic(int agents, Vector target) : agents_(agents), target_(std::move(target)) {}
  int agents() const override { return agents_; }
  int dim() const override { return static_cast<int>(target_.size()); }
  double smooth(int, ConstBlock x, ConstBlock, MutableBlock grad) const override {
    grad = x - target_;
    return 0.5 * grad.squaredNorm();
  }
  bool has_nonsmooth() const override { return false; }
  double nonsmooth_value(int, ConstBlock) const override { return 0.0; }
  void prox(int, ConstBlock v, double, MutableBlock out) const override { out = v; }
  std::optional<double> lipschitz() const override { return 1.0; }

 private:
  int agents_;
  Vector target_;
};

struct Fixture {
  ProblemInstance problem;
  SimNetwork net;
  StackedVector omega;
  StackedVector anchor;
};

Fixture random_fixture(Rng& rng, bool lasso) {
  const int n = 2 + static_cast<int>(rng() % 5);
  const int d = 1 + static_cast<int>(rng() % 4);
  std::vector<LocalObjective> locals;
  for (int i = 0; i < n; ++i) {
    if (lasso) {
      locals.push_back(lasso_local(oracle::random_matrix(3, d, rng),
                                   oracle::random_vector(3, rng), 0.8, n));
    } else {
      locals.push_back(oracle::random_quadratic_local(d, rng));
    }
  }
  ProblemInstance p = oracle::custom_problem(std::move(locals));
  SimNetwork net = make_metropolis_network(oracle::random_graph(n, rng), d);
  // Omega in the range of Z, as the outer loop keeps it.
  StackedVector omega = apply_Z(oracle::random_stacked(n, d, rng), net.mixing());
  return {std::move(p), std::move(net), omega, oracle::random_stacked(n, d, rng)};
}

double psi_value(const CompositeOracle& oracle, const StackedVector& x,
                 const MixingMatrix& w) {
  StackedVector zx = apply_Z(x, w);
  double total = 0.0;
  Vector g(x.dim());
  for (int i = 0; i < x.agents(); ++i) {
    total += oracle.smooth(i, x.block(i), zx.block(i), g);
    total += oracle.nonsmooth_value(i, x.block(i));
  }
  return total;
}

TEST(Momentum, Recursion) {
  EXPECT_DOUBLE_EQ(next_momentum(1.0), 0.5 * (1.0 + std::sqrt(5.0)));
  double t = 1.0;
  for (int j = 0; j < 50; ++j) {
    const double next = next_momentum(t);
    EXPECT_NEAR(next * next - next, t * t, 1e-9 * t * t);
    t = next;
  }
}

TEST(Fista, ExactStepOnScalarQuadratic) {
  DecoupledQuadratic oracle(2, Vector::Constant(1, 5.0));
  SimNetwork net = make_metropolis_network(Graph(2, {{0, 1}}), 1);
  AcceleratedProxGradient solver;
  StackedVector x0(2, 1);
  solver.start(oracle, x0, x0);
  const InnerIterate& it = solver.step(oracle, net);
  EXPECT_EQ(it.x.block(0)(0), 5.0);
  EXPECT_EQ(it.x.block(1)(0), 5.0);
  EXPECT_EQ(it.delta.norm(), 0.0);
}

TEST(Fista, OneExchangePerIteration) {
  Rng rng(1);
  Fixture f = random_fixture(rng, true);
  SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, 2.0, 1e-3, f.net);
  AcceleratedProxGradient solver;
  solver.start(psi, f.anchor, apply_Z(f.anchor, f.net.mixing()));
  for (int j = 1; j <= 25; ++j) {
    solver.step(psi, f.net);
    EXPECT_EQ(f.net.comm_report().vector_rounds, j);
  }
}

TEST(Fista, ConvergesToDenseSolveOnQuadraticSubproblems) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f = random_fixture(rng, false);
    const double sigma = 1.5;
    const double tau = 0.5;
    SubproblemOracle psi =
        subproblem_oracle(f.problem, f.omega, f.anchor, sigma, tau, f.net);
    const int n = f.problem.agents;
    const int d = f.problem.dim;

    // Dense Hessian and right-hand side of the stationarity system.
    const Vector zero = Vector::Zero(n * d);
    const Vector a = f.anchor.flat();
    const Vector g0 = oracle::dense_psi_gradient(f.problem, f.net.mixing().weights(), zero,
                                                 f.omega.flat(), a, sigma, tau);
    Matrix h(n * d, n * d);
    for (int c = 0; c < n * d; ++c) {
      h.col(c) = oracle::dense_psi_gradient(f.problem, f.net.mixing().weights(),
                                            Vector::Unit(n * d, c), f.omega.flat(), a,
                                            sigma, tau) -
                 g0;
    }
    const Vector solution = h.ldlt().solve(-g0);

    AcceleratedProxGradient solver;
    StackedVector x0(n, d);
    solver.start(psi, x0, x0);
    double error = 0.0;
    for (int j = 0; j < 500; ++j) {
      const InnerIterate& it = solver.step(psi, f.net);
      error = (it.x.flat() - solution).norm();
      solver.observe({0.0, [&] {
                        double s = 0.0;
                        for (double v : it.restart_parts) s += v;
                        return s;
                      }()});
      if (error < 1e-9) break;
    }
    EXPECT_LT(error, 1e-8);
  }
}

TEST(Fista, AcceleratedRateBound) {
  Rng rng(3);
  Fixture f = random_fixture(rng, false);
  const double sigma = 4.0;
  const double tau = 1e-3;
  SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, sigma, tau, f.net);
  const int n = f.problem.agents;
  const int d = f.problem.dim;

  SubsolverConfig plain;
  plain.restart = RestartRule::kNone;
  AcceleratedProxGradient reference(plain);
  StackedVector x0(n, d);
  reference.start(psi, x0, x0);
  StackedVector best;
  for (int j = 0; j < 20000; ++j) best = reference.step(psi, f.net).x;
  const double optimum = psi_value(psi, best, f.net.mixing());
  const double l = *psi.lipschitz();
  const double r2 = (x0 - best).squared_norm();

  AcceleratedProxGradient solver(plain);
  solver.start(psi, x0, x0);
  for (int j = 1; j <= 300; ++j) {
    const double gap = psi_value(psi, solver.step(psi, f.net).x, f.net.mixing()) - optimum;
    EXPECT_LE(gap, 1.1 * 2.0 * l * r2 / ((j + 1.0) * (j + 1.0)) + 1e-12) << "j = " << j;
  }
}

TEST(Fista, L1FixedPointSatisfiesCoordinateOptimality) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    Fixture f = random_fixture(rng, true);
    const double sigma = 2.0;
    const double tau = 0.1;
    SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, sigma, tau, f.net);
    AcceleratedProxGradient solver;
    StackedVector x0(f.problem.agents, f.problem.dim);
    solver.start(psi, x0, x0);
    const InnerIterate* it = nullptr;
    for (int j = 0; j < 20000; ++j) {
      it = &solver.step(psi, f.net);
      double product = 0.0;
      for (double v : it->restart_parts) product += v;
      solver.observe({0.0, product});
    }
    const double threshold = 0.8 / f.problem.agents;
    StackedVector zx = apply_Z(it->x, f.net.mixing());
    for (int i = 0; i < f.problem.agents; ++i) {
      Vector g(f.problem.dim);
      psi.smooth(i, it->x.block(i), zx.block(i), g);
      for (int k = 0; k < f.problem.dim; ++k) {
        const double xk = it->x.block(i)(k);
        if (xk != 0.0) {
          EXPECT_NEAR(g(k) + threshold * (xk > 0 ? 1.0 : -1.0), 0.0, 1e-8);
        } else {
          EXPECT_LE(std::abs(g(k)), threshold + 1e-8);
        }
      }
    }
  }
}

TEST(Delta, SmoothCaseIsThePsiGradient) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f = random_fixture(rng, false);
    const double sigma = 3.0;
    const double tau = 0.2;
    SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, sigma, tau, f.net);
    StackedVector x = oracle::random_stacked(f.problem.agents, f.problem.dim, rng);
    StackedVector delta = compute_delta(psi, x, apply_Z(x, f.net.mixing()), nullptr);
    const Vector dense = oracle::dense_psi_gradient(
        f.problem, f.net.mixing().weights(), x.flat(), f.omega.flat(), f.anchor.flat(),
        sigma, tau);
    EXPECT_LE((delta.flat() - dense).norm(), 1e-14 * std::max(1.0, dense.norm()) * 10);
  }
}

TEST(Delta, NonsmoothCaseLiesInTheSubdifferential) {
  Rng rng(6);
  Fixture f = random_fixture(rng, true);
  SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, 2.0, 0.1, f.net);
  AcceleratedProxGradient solver;
  StackedVector x0(f.problem.agents, f.problem.dim);
  solver.start(psi, x0, x0);
  const double threshold = 0.8 / f.problem.agents;
  for (int j = 0; j < 30; ++j) {
    const InnerIterate& it = solver.step(psi, f.net);
    StackedVector zx = apply_Z(it.x, f.net.mixing());
    for (int i = 0; i < f.problem.agents; ++i) {
      Vector g(f.problem.dim);
      psi.smooth(i, it.x.block(i), zx.block(i), g);
      // delta - grad s must be a subgradient of (lambda/n)||.||_1 at x.
      const Vector s = it.delta.block(i) - g;
      for (int k = 0; k < f.problem.dim; ++k) {
        const double xk = it.x.block(i)(k);
        const double tol = 1e-9 * (1.0 + std::abs(g(k)));
        if (xk > 0.0) {
          EXPECT_NEAR(s(k), threshold, tol);
        } else if (xk < 0.0) {
          EXPECT_NEAR(s(k), -threshold, tol);
        } else {
          EXPECT_LE(std::abs(s(k)), threshold + tol);
        }
      }
    }
  }
}

TEST(LipschitzBound, RingExample) {
  auto zero = [](ConstBlock, MutableBlock grad) {
    grad.setZero();
    return 0.0;
  };
  std::vector<LocalObjective> locals(4, LocalObjective(2, zero, std::nullopt, 0.0));
  ProblemInstance p = oracle::custom_problem(locals);
  SimNetwork net = make_metropolis_network(build_topology(TopologySpec::ring(), 4, 0), 2);
  EXPECT_NEAR(*lipschitz_bound(p, 1.0, 1.0, net.spectral()), 7.0 / 3.0, 1e-12);
  EXPECT_LE(*lipschitz_bound(p, 5.0, 1.0, net.spectral()), 2.0 * 5.0 + 1.0 / 5.0);

  std::vector<LocalObjective> unhinted(4, LocalObjective(2, zero));
  EXPECT_FALSE(lipschitz_bound(oracle::custom_problem(unhinted), 1.0, 1.0, net.spectral()));
}

TEST(LipschitzBound, BoundsPsiGradientDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f = random_fixture(rng, false);
    const double sigma = 10.0;
    const double tau = 1e-3;
    SubproblemOracle psi = subproblem_oracle(f.problem, f.omega, f.anchor, sigma, tau, f.net);
    const double l = *psi.lipschitz();
    for (int pair = 0; pair < 50; ++pair) {
      StackedVector u = oracle::random_stacked(f.problem.agents, f.problem.dim, rng);
      StackedVector v = oracle::random_stacked(f.problem.agents, f.problem.dim, rng);
      StackedVector gu = compute_delta(psi, u, apply_Z(u, f.net.mixing()), nullptr);
      StackedVector gv = compute_delta(psi, v, apply_Z(v, f.net.mixing()), nullptr);
      EXPECT_LE((gu - gv).norm(), (l + 1e-8) * (u - v).norm());
    }
  }
}

TEST(Backtracking, UsedWithoutHintAndConverges) {
  Rng rng(8);
  Fixture f = random_fixture(rng, false);
  std::vector<LocalObjective> locals;
  for (const auto& local : f.problem.locals) {
    locals.emplace_back(local.dim(), [local](ConstBlock x, MutableBlock g) {
      return local.smooth(x, g);
    });
  }
  ProblemInstance bare = oracle::custom_problem(std::move(locals));
  SubproblemOracle psi = subproblem_oracle(bare, f.omega, f.anchor, 2.0, 0.5, f.net);
  ASSERT_FALSE(psi.lipschitz());
  SubproblemOracle hinted = subproblem_oracle(f.problem, f.omega, f.anchor, 2.0, 0.5, f.net);

  AcceleratedProxGradient solver;
  AcceleratedProxGradient reference;
  StackedVector x0(bare.agents, bare.dim);
  solver.start(psi, x0, x0);
  reference.start(hinted, x0, x0);
  const InnerIterate* it = nullptr;
  const InnerIterate* ref = nullptr;
  for (int j = 0; j < 2000; ++j) {
    it = &solver.step(psi, f.net);
    ref = &reference.step(hinted, f.net);
  }
  EXPECT_GT(solver.current_lipschitz(), 1.0);
  EXPECT_LE((it->x - ref->x).norm(), 1e-8 * std::max(1.0, ref->x.norm()));
  EXPECT_LE(it->delta.norm(), 1e-8);
}

TEST(RestartPolicy, FunctionValueRule) {
  EXPECT_FALSE(momentum_reset_policy(2.0, 1.0));
  EXPECT_FALSE(momentum_reset_policy(1.0, 1.0));
  EXPECT_TRUE(momentum_reset_policy(1.0, 1.5));
  EXPECT_TRUE(gradient_reset_policy(1e-12));
  EXPECT_FALSE(gradient_reset_policy(0.0));
}

TEST(RestartPolicy, MonotoneRunNeverResets) {
  DecoupledQuadratic oracle(2, Vector::Constant(3, 1.0));
  SimNetwork net = make_metropolis_network(Graph(2, {{0, 1}}), 3);
  SubsolverConfig config;
  config.restart = RestartRule::kFunctionValue;
  AcceleratedProxGradient solver(config);
  StackedVector x0(2, 3);
  solver.start(oracle, x0, x0);
  for (int j = 0; j < 20; ++j) {
    const InnerIterate& it = solver.step(oracle, net);
    solver.observe({it.objective_parts[0] + it.objective_parts[1], 0.0});
  }
  EXPECT_EQ(solver.restarts(), 0);
}

TEST(RestartPolicy, OscillationOnIllConditionedQuadraticResets) {
  // Diagonal Hessian with condition number 1e4 on two decoupled agents.
  Matrix h = Vector::LinSpaced(4, 1e-4, 1.0).asDiagonal();
  Vector b = Vector::Ones(4);
  std::vector<LocalObjective> locals{oracle::quadratic_form_local(h, b),
                                     oracle::quadratic_form_local(h, b)};
  ProblemInstance p = oracle::custom_problem(locals);
  SimNetwork net = make_metropolis_network(Graph(2, {{0, 1}}), 4);
  StackedVector zero(2, 4);
  // sigma large and Omega = 0 make Psi ~ F on the consensus subspace.
  SubproblemOracle psi = subproblem_oracle(p, zero, zero, 1.0, 1e-12, net);

  auto run = [&](RestartRule rule, int* restarts) {
    SubsolverConfig config;
    config.restart = rule;
    AcceleratedProxGradient solver(config);
    solver.start(psi, zero, zero);
    const InnerIterate* it = nullptr;
    for (int j = 0; j < 1500; ++j) {
      it = &solver.step(psi, net);
      solver.observe({it->objective_parts[0] + it->objective_parts[1], 0.0});
    }
    *restarts = solver.restarts();
    return psi_value(psi, it->x, net.mixing());
  };
  int with = 0;
  int without = 0;
  const double reset_final = run(RestartRule::kFunctionValue, &with);
  const double plain_final = run(RestartRule::kNone, &without);
  EXPECT_GE(with, 1);
  EXPECT_EQ(without, 0);
  EXPECT_LE(reset_final, plain_final);
}

TEST(RestartPolicy, MomentumIsOneAfterReset) {
  DecoupledQuadratic oracle(2, Vector::Constant(1, 1.0));
  SimNetwork net = make_metropolis_network(Graph(2, {{0, 1}}), 1);
  AcceleratedProxGradient solver;
  StackedVector x0(2, 1);
  solver.start(oracle, x0, x0);
  solver.step(oracle, net);
  solver.step(oracle, net);
  EXPECT_GT(solver.momentum(), 1.0);
  solver.observe({0.0, 1.0});
  EXPECT_EQ(solver.momentum(), 1.0);
  EXPECT_EQ(solver.restarts(), 1);
}

TEST(SubsolverConfig, RejectsBadBacktrackingParameters) {
  SubsolverConfig config;
  config.step_rule.beta = 1.0;
  EXPECT_THROW(AcceleratedProxGradient{config}, std::invalid_argument);
  config.step_rule.beta = 0.5;
  config.step_rule.initial_lipschitz = 0.0;
  EXPECT_THROW(AcceleratedProxGradient{config}, std::invalid_argument);
}

}  // namespace
}  // namespace dripalm
