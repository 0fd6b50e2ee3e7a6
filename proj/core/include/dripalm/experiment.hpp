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

// Configuration-driven experiment runner and result tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dripalm/netgraph.hpp"
#include "dripalm/objectives.hpp"

namespace dripalm {

/// Raised for malformed configs; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DripalmSweep {
  std::vector<double> rho{0.99};
  double tau = 1e-3;
  double sigma_growth = 1.5;
  double sigma_cap = 1e4;
  int max_outer = 200;
  int max_inner = 5000;
};

struct IdealSweep {
  std::vector<double> eps0{1e-2};
  std::vector<double> alpha{0.2};
  double sigma_growth = 1.5;
  double sigma_cap = 1e4;
  int max_outer = 200;
  int max_inner = 5000;
};

struct SingleLoopSweep {
  std::optional<double> step;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int repetitions = 1;
  std::uint64_t seed_base = 0;
  std::int64_t max_comm = 30000;
  double kkt_tol = 1e-6;
  int check_every = 10;

  ProblemFamily family = ProblemFamily::kLogistic;
  int agents = 10;
  int dim = 1000;
  int samples = 400;
  double lambda = 1e-2;               // logistic
  double label_noise = 0.1;           // logistic
  std::vector<double> lambda_c{0.1};  // LASSO
  double density = 0.1;               // LASSO
  double noise = 0.1;                 // LASSO

  std::vector<TopologySpec> topologies{TopologySpec::erdos_renyi(0.2)};

  std::optional<DripalmSweep> dripalm;
  std::optional<IdealSweep> ideal;
  std::optional<SingleLoopSweep> pg_extra;
  std::optional<SingleLoopSweep> nids;
};

/// INI-style text: sections [experiment], [problem], [topology] and one per
/// solver ([dripalm], [ideal], [pg_extra], [nids]). List values are comma
/// separated; numbers may be written as base^exponent (e.g. 10^-1.5).
ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& source = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// One CSV line. Mean rows carry replicate "mean" and averaged numbers.
struct ResultRow {
  std::string solver;
  std::string param1;  // solver parameters, e.g. rho=0.99
  std::string param2;  // scenario, e.g. topology=ring;lambda_c=0.1
  std::string replicate;
  double vector_rounds = 0.0;
  double scalar_rounds = 0.0;
  double outer_iters = 0.0;
  double kkt = 0.0;
  double consensus_res = 0.0;
  double stationarity_res = 0.0;
  double wall_time_ms = 0.0;
  std::string status;
};

inline constexpr const char* kCsvHeader =
    "solver,param1,param2,replicate,vector_rounds,scalar_rounds,outer_iters,kkt,"
    "consensus_res,stationarity_res,wall_time_ms,status";

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides seed_base
  int jobs = 1;
  bool wall_time = false;             // otherwise wall_time_ms is written as 0
  std::ostream* log = nullptr;        // progress and solver failures
};

/// Detail rows grouped by scenario and solver setting, each group followed by
/// its mean row. Deterministic in (config, seed) whatever the job count.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const RunOptions& options = {});

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string to_csv(const std::vector<ResultRow>& rows);
/// Throws std::runtime_error with the line number on malformed input.
std::vector<ResultRow> read_csv(std::istream& in);

/// Mean rows recomputed from the detail rows, one per group in order.
std::vector<ResultRow> recompute_means(const std::vector<ResultRow>& rows);

struct TableReport {
  std::string text;
  /// Stored mean rows that differ from the recomputed ones by more than 1e-12
  /// (relative), described one per entry.
  std::vector<std::string> mismatches;
};

/// Aligned comparison table of the mean rows; D-ripALM settings ordered by
/// rho descending. Header only for an input without detail rows.
TableReport compare_table(const std::vector<ResultRow>& rows);

/// `key=value` generator arguments for `bench gen`.
LogregParams parse_logreg_params(const std::vector<std::string>& args);
LassoParams parse_lasso_params(const std::vector<std::string>& args);

/// Shortest round-tripping decimal form.
std::string format_number(double value);

}  // namespace dripalm
