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

#include "dripalm/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dripalm {
namespace {

double consensus_residual(const StackedVector& x, SimNetwork& net) {
  const std::vector<double> shares = net.exchange_disagreement(x);
  std::vector<std::array<double, 1>> parts(x.agents());
  for (int i = 0; i < x.agents(); ++i) parts[i] = {shares[i]};
  return std::sqrt(net.scalar_allreduce(parts)[0]);
}

KktReport combine(double consensus, double stationarity) {
  return {consensus, stationarity, std::max(consensus, stationarity)};
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxOuter:
      return "max_outer";
    case SolveStatus::kCommBudget:
      return "comm_budget";
    case SolveStatus::kInnerCap:
      return "inner_cap";
    case SolveStatus::kDiverged:
      return "diverged";
  }
  return "unknown";
}

void write_diagnostics_csv(std::ostream& out,
                           const std::vector<OuterRecord>& history) {
  out << "k,sigma_k,tau_k,norm_delta,norm_p,norm_u,kkt,vector_rounds\n";
  char line[256];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                  r.k, r.sigma, r.tau, r.norm_delta, r.norm_p, r.norm_u, r.kkt,
                  static_cast<long long>(r.vector_rounds));
    out << line;
  }
}

KktReport kkt_smooth(const StackedVector& x, const StackedVector& omega,
                     const ProblemInstance& problem, SimNetwork& net) {
  if (!problem.smooth()) throw std::invalid_argument("kkt_smooth needs a smooth problem");
  if (!x.same_shape(omega)) throw std::invalid_argument("x and Omega differ in shape");
  SimNetwork::StoppingCheckScope scope(net);
  const std::vector<double> shares = net.exchange_disagreement(x);
  std::vector<std::array<double, 2>> parts(x.agents());
  for (int i = 0; i < x.agents(); ++i) {
    Vector g = problem.locals[i].smooth_gradient(x.block(i));
    g += omega.block(i);
    parts[i] = {shares[i], g.squaredNorm()};
  }
  auto total = net.scalar_allreduce(parts);
  return combine(std::sqrt(total[0]), std::sqrt(total[1]));
}

Vector refine_sparse(Vector v, double threshold) {
  const double scale = v.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return v;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) / scale < threshold) v(k) = 0.0;
  }
  return v;
}

double lasso_prox_residual(const Vector& xbar, const ProblemInstance& problem) {
  if (problem.meta.family != ProblemFamily::kLasso) {
    throw std::invalid_argument("lasso residual needs a LASSO problem");
  }
  Vector grad = Vector::Zero(problem.dim);
  double residual_sq = 0.0;
  for (int i = 0; i < problem.agents; ++i) {
    Vector r = problem.meta.data[i] * xbar - problem.meta.targets[i];
    grad.noalias() += problem.meta.data[i].transpose() * r;
    residual_sq += r.squaredNorm();
  }
  Vector p(problem.dim);
  soft_threshold(xbar - grad, problem.meta.lambda, p);
  return (xbar - p).norm() / (1.0 + std::sqrt(residual_sq) + xbar.norm());
}

KktReport kkt_lasso(const StackedVector& x, const ProblemInstance& problem,
                    SimNetwork& net, const LassoKktOptions& options) {
  if (problem.meta.family != ProblemFamily::kLasso) {
    throw std::invalid_argument("kkt_lasso needs a LASSO problem");
  }
  SimNetwork::StoppingCheckScope scope(net);
  const double consensus = consensus_residual(x, net);

  Vector xbar = net.vector_allreduce(x) / static_cast<double>(x.agents());
  if (options.refine) xbar = refine_sparse(std::move(xbar), options.refine_threshold);

  // Each agent evaluates its least-squares part at the common average; the
  // gradient sum A^T(A xbar - b) and the residual norm are then aggregated.
  StackedVector grads(x.agents(), x.dim());
  std::vector<std::array<double, 1>> parts(x.agents());
  for (int i = 0; i < x.agents(); ++i) {
    parts[i] = {2.0 * problem.locals[i].smooth(xbar, grads.block(i))};
  }
  Vector grad = net.vector_allreduce(grads);
  const double residual_norm =
      std::sqrt(std::max(0.0, net.scalar_allreduce(parts)[0]));

  Vector p(x.dim());
  soft_threshold(xbar - grad, problem.meta.lambda, p);
  const double stationarity =
      (xbar - p).norm() / (1.0 + residual_norm + xbar.norm());
  return combine(consensus, stationarity);
}

KktReport kkt_consensus_gradient(const StackedVector& x,
                                 const ProblemInstance& problem, SimNetwork& net) {
  if (!problem.smooth()) {
    throw std::invalid_argument("gradient residual needs a smooth problem");
  }
  SimNetwork::StoppingCheckScope scope(net);
  const double consensus = consensus_residual(x, net);
  StackedVector grads(x.agents(), x.dim());
  for (int i = 0; i < x.agents(); ++i) {
    problem.locals[i].smooth(x.block(i), grads.block(i));
  }
  return combine(consensus, net.vector_allreduce(grads).norm());
}

KktReport evaluate_kkt(const StackedVector& x, const StackedVector* omega,
                       const ProblemInstance& problem, SimNetwork& net) {
  if (problem.meta.family == ProblemFamily::kLasso) return kkt_lasso(x, problem, net);
  if (problem.smooth()) {
    return omega ? kkt_smooth(x, *omega, problem, net)
                 : kkt_consensus_gradient(x, problem, net);
  }
  throw std::invalid_argument(
      "no KKT residual available for nonsmooth problems outside the LASSO family");
}

Theorem1Summary theorem1_diagnostics(const std::vector<OuterRecord>& history) {
  if (history.empty()) throw std::invalid_argument("empty diagnostic history");
  Theorem1Summary s;
  s.first = history.front();
  s.last = history.back();
  s.delta_decreased = s.last.norm_delta < s.first.norm_delta;
  s.p_decreased = s.last.norm_p < s.first.norm_p;
  s.u_decreased = s.last.norm_u < s.first.norm_u;
  s.final_max = std::max({s.last.norm_delta, s.last.norm_p, s.last.norm_u});
  return s;
}

}  // namespace dripalm
