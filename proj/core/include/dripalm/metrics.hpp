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

// Stopping rules and run diagnostics. All traffic generated here is recorded
// as stopping-test traffic on the network.

#pragma once

#include <vector>

#include "dripalm/objectives.hpp"
#include "dripalm/simnet.hpp"
#include "dripalm/solve_result.hpp"

namespace dripalm {

/// max{ ||sqrt(Z) x||, ||grad F(x) + Omega|| } with Omega = sqrt(Z) y.
KktReport kkt_smooth(const StackedVector& x, const StackedVector& omega,
                     const ProblemInstance& problem, SimNetwork& net);

struct LassoKktOptions {
  bool refine = true;
  double refine_threshold = 1e-8;
};

/// Zeroes entries with |v_k| / ||v||_inf below the threshold. Leaves v alone
/// when ||v||_inf = 0.
Vector refine_sparse(Vector v, double threshold = 1e-8);

/// Relative prox residual of the (refined) network average
///   ||xbar - prox_{lambda||.||_1}(xbar - A^T(A xbar - b))||
///     / (1 + ||A xbar - b|| + ||xbar||),
/// combined with ||sqrt(Z) x||.
KktReport kkt_lasso(const StackedVector& x, const ProblemInstance& problem,
                    SimNetwork& net, const LassoKktOptions& options = {});

/// The same relative residual for a single point, computed centrally.
double lasso_prox_residual(const Vector& xbar, const ProblemInstance& problem);

/// Dual-free residual for single-loop methods on smooth problems:
/// max{ ||sqrt(Z) x||, ||sum_i grad f_i(x_i)|| }.
KktReport kkt_consensus_gradient(const StackedVector& x,
                                 const ProblemInstance& problem, SimNetwork& net);

/// Picks the residual matching the problem: LASSO -> kkt_lasso; smooth with a
/// multiplier -> kkt_smooth; smooth without -> kkt_consensus_gradient.
KktReport evaluate_kkt(const StackedVector& x, const StackedVector* omega,
                       const ProblemInstance& problem, SimNetwork& net);

struct Theorem1Summary {
  OuterRecord first;
  OuterRecord last;
  bool delta_decreased = false;
  bool p_decreased = false;
  bool u_decreased = false;
  /// Largest of the three final norms.
  double final_max = 0.0;
};

/// Compares the final records with the k = 1 record. Throws on empty input.
Theorem1Summary theorem1_diagnostics(const std::vector<OuterRecord>& history);

}  // namespace dripalm
