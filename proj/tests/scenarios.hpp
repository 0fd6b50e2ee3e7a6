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


// Small end-to-end scenarios shared by the unit tests and the acceptance run.

#pragma once

#include <algorithm>
#include <cmath>

#include "dripalm/metrics.hpp"
#include "dripalm/objectives.hpp"
#include "dripalm/ripalm.hpp"
#include "oracles.hpp"

namespace dripalm::scenario {

struct GroundTruth {
  SolveResult result;
  Vector reference;
  double average_error = 0.0;  // ||xbar - x*||_inf
  double objective_gap = 0.0;  // |F(x^K) - F*| / (1 + |F*|)
  Theorem1Summary diagnostics;
};

inline GroundTruth finish(SolveResult result, const ProblemInstance& p, Vector reference) {
  GroundTruth g;
  g.average_error = (result.x.average() - reference).lpNorm<Eigen::Infinity>();
  const double optimum = p.centralized_value(reference);
  g.objective_gap = std::abs(p.value(result.x) - optimum) / (1.0 + std::abs(optimum));
  if (!result.history.empty()) g.diagnostics = theorem1_diagnostics(result.history);
  g.result = std::move(result);
  g.reference = std::move(reference);
  return g;
}

inline DripalmConfig tight_config() {
  DripalmConfig config;
  config.kkt_tol = 1e-9;
  config.max_total_comm = 200000;
  return config;
}

/// d = 20 logistic regression against a damped Newton oracle.
inline GroundTruth logistic_d20(std::uint64_t seed) {
  LogregParams params;
  params.agents = 5;
  params.dim = 20;
  params.samples = 100;
  params.seed = seed;
  ProblemInstance p = gen_logreg(params);
  SimNetwork net = make_metropolis_network(
      build_topology(TopologySpec::erdos_renyi(0.5), p.agents, derive_seed(seed, 1)), p.dim);
  SolveResult r = run_dripalm(tight_config(), p, net);
  return finish(std::move(r), p,
                oracle::newton_logreg(p.meta.data, p.meta.targets, p.meta.lambda));
}

/// d = 20 LASSO against a coordinate-descent oracle.
inline GroundTruth lasso_d20(std::uint64_t seed) {
  LassoParams params;
  params.agents = 5;
  params.dim = 20;
  params.samples = 40;
  params.lambda_c = 0.1;
  params.seed = seed;
  ProblemInstance p = gen_lasso(params);
  SimNetwork net = make_metropolis_network(
      build_topology(TopologySpec::erdos_renyi(0.5), p.agents, derive_seed(seed, 1)), p.dim);
  SolveResult r = run_dripalm(tight_config(), p, net);
  return finish(std::move(r), p,
                oracle::cd_lasso(oracle::stack_rows(p.meta.data),
                                 oracle::stack_vectors(p.meta.targets), p.meta.lambda));
}

/// Largest ||Omega^k - sqrt(Z) y^k|| over the first `iterations` outer steps,
/// with y tracked explicitly through y^{k+1} = y^k + sigma_k sqrt(Z) x^{k+1}.
inline double transformed_dual_error(std::uint64_t seed, int iterations = 10) {
  Rng rng(seed);
  const int n = 4 + static_cast<int>(rng() % 5);
  const int d = 2 + static_cast<int>(rng() % 3);
  LogregParams params;
  params.agents = n;
  params.dim = d;
  params.samples = 20 * n;
  params.seed = rng();
  ProblemInstance p = gen_logreg(params);
  SimNetwork net = make_metropolis_network(oracle::random_graph(n, rng), d);

  DripalmConfig config;
  config.record_iterates = true;
  config.max_outer = iterations;
  config.kkt_tol = 0.0;
  config.max_total_comm = 1000000;
  SolveResult r = run_dripalm(config, p, net);

  const Matrix root = oracle::kron_sqrt_Z(net.mixing().weights(), d);
  Vector y = Vector::Zero(n * d);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.omega_trace.size(); ++k) {
    if (k > 0) y += config.sigma(static_cast<int>(k) - 1) * root * r.x_trace[k].flat();
    const Vector omega = r.omega_trace[k].flat();
    worst = std::max(worst, (omega - root * y).norm() / (1.0 + omega.norm()));
  }
  if (static_cast<int>(r.omega_trace.size()) != iterations + 1) return INFINITY;
  return worst;
}

}  // namespace dripalm::scenario
