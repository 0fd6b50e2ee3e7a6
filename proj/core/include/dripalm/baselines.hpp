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

// Reference decentralized solvers: PG-EXTRA, NIDS and an IDEAL-style
// double-loop ALM driven by an absolute inner tolerance.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "dripalm/objectives.hpp"
#include "dripalm/simnet.hpp"
#include "dripalm/solve_result.hpp"
#include "dripalm/subsolvers.hpp"

namespace dripalm {

enum class BaselineKind { kPgExtra, kNids, kIdeal };

std::string to_string(BaselineKind kind);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::kPgExtra;
  /// Step size; defaults to 1/(2 max L_i) for PG-EXTRA, 1/max L_i for NIDS.
  std::optional<double> step;
  double kkt_tol = 1e-6;
  std::int64_t max_comm = 30000;
  /// Stopping test frequency, in iterations, for the single-loop methods.
  int check_every = 10;
  double divergence_bound = 1e12;

  // IDEAL only.
  double eps0 = 1e-2;
  double eps_decay = 0.2;
  /// Strong convexity modulus; taken from the problem when absent.
  std::optional<double> strong_convexity;
  std::function<double(int)> sigma;  // defaults to min(1.5^k, 1e4)
  int max_outer = 200;
  SubsolverConfig subsolver;
};

/// Throws std::invalid_argument on a malformed configuration.
void validate(const BaselineConfig& config);

SolveResult pg_extra_run(const ProblemInstance& problem, SimNetwork& net,
                         const BaselineConfig& config);
SolveResult nids_run(const ProblemInstance& problem, SimNetwork& net,
                     const BaselineConfig& config);
SolveResult ideal_run(const ProblemInstance& problem, SimNetwork& net,
                      const BaselineConfig& config);

/// Dispatches on config.kind.
SolveResult run_baseline(const ProblemInstance& problem, SimNetwork& net,
                         const BaselineConfig& config);

/// (1 / lambda^2) ||grad L||^2 <= eps.
bool ideal_criterion(double grad_norm_sq, double strong_convexity, double eps);

}  // namespace dripalm
