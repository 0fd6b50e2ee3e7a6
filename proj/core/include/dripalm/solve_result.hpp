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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dripalm/stacked_vector.hpp"

namespace dripalm {

enum class SolveStatus {
  kConverged,
  kMaxOuter,      // outer-iteration limit reached
  kCommBudget,    // vector-round budget exhausted
  kInnerCap,      // an inner loop hit its cap before its stopping test passed
  kDiverged,      // iterate norm blew past the divergence guard
};

std::string to_string(SolveStatus status);

/// Consensus infeasibility ||sqrt(Z) x|| and a stationarity residual;
/// kkt is the larger of the two.
struct KktReport {
  double consensus_res = 0.0;
  double stationarity_res = 0.0;
  double kkt = 0.0;
};

/// Per-outer-iteration diagnostics of a double-loop run. Norms are those of
/// the error term Delta^k, p^k = Delta^k - (tau/sigma)(x^k - x^{k-1}) and
/// u^k = -sqrt(Z) x^k.
struct OuterRecord {
  int k = 0;
  double sigma = 0.0;
  double tau = 0.0;
  std::int64_t inner_iters = 0;
  double norm_delta = 0.0;
  double norm_p = 0.0;
  double norm_u = 0.0;
  double objective = 0.0;
  double kkt = 0.0;
  std::int64_t vector_rounds = 0;
};

struct SolveResult {
  StackedVector x;
  StackedVector omega;
  SolveStatus status = SolveStatus::kMaxOuter;
  std::string message;
  int outer_iters = 0;
  std::int64_t inner_iters = 0;
  std::int64_t vector_rounds = 0;
  std::int64_t scalar_rounds = 0;
  KktReport final_kkt;
  std::vector<double> kkt_history;
  std::vector<OuterRecord> history;
  // Filled only when iterate recording is requested: x^k and Omega^k for
  // k = 0, 1, ..., outer_iters.
  std::vector<StackedVector> x_trace;
  std::vector<StackedVector> omega_trace;

  bool converged() const { return status == SolveStatus::kConverged; }
};

/// CSV with columns k,sigma_k,tau_k,norm_delta,norm_p,norm_u,kkt,vector_rounds.
void write_diagnostics_csv(std::ostream& out,
                           const std::vector<OuterRecord>& history);

}  // namespace dripalm
