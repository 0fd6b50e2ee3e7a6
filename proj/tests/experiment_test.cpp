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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dripalm/experiment.hpp"

namespace dripalm {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in, "test.cfg");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kTinyLogreg = R"(
[experiment]
name = tiny
repetitions = 2
seed_base = 3
[problem]
family = logreg
agents = 4
dim = 6
samples = 40
[topology]
kinds = ring
[dripalm]
rho = 0.5, 0.99
[ideal]
eps0 = 0.1
alpha = 0.2, 0.8
)";

const char* kTinyLasso = R"(
[experiment]
repetitions = 1
max_comm = 2000
[problem]
family = lasso
agents = 5
dim = 8
samples = 10
lambda_c = 10^-1, 10^-2
[topology]
kinds = ring, erdos_renyi, geometric
probability = 0.6
[dripalm]
rho = 0.99
[pg_extra]
step = auto
[nids]
step = auto
)";

TEST(ConfigParse, FullExample) {
  ExperimentConfig c = parse(kTinyLasso);
  EXPECT_EQ(c.family, ProblemFamily::kLasso);
  ASSERT_EQ(c.lambda_c.size(), 2u);
  EXPECT_DOUBLE_EQ(c.lambda_c[0], 0.1);
  EXPECT_DOUBLE_EQ(c.lambda_c[1], 0.01);
  ASSERT_EQ(c.topologies.size(), 3u);
  EXPECT_EQ(c.topologies[1].kind, TopologyKind::kErdosRenyi);
  EXPECT_DOUBLE_EQ(c.topologies[1].probability, 0.6);
  ASSERT_TRUE(c.dripalm);
  EXPECT_EQ(c.dripalm->rho, std::vector<double>{0.99});
  EXPECT_TRUE(c.pg_extra && !c.pg_extra->step);
  EXPECT_TRUE(c.nids);
  EXPECT_FALSE(c.ideal);
  EXPECT_EQ(c.max_comm, 2000);
}

TEST(ConfigParse, BareSectionSelectsSolverDefaults) {
  ExperimentConfig c = parse("[problem]\nfamily = lasso\n[nids]\n[dripalm]\n");
  ASSERT_TRUE(c.nids);
  EXPECT_FALSE(c.nids->step);
  ASSERT_TRUE(c.dripalm);
  EXPECT_EQ(c.dripalm->rho, std::vector<double>{0.99});
}

TEST(ConfigParse, PowerNotation) {
  ExperimentConfig c = parse(R"(
[problem]
family = lasso
lambda_c = 10^-1.5, 2^3
[dripalm]
rho = 0.5
)");
  EXPECT_NEAR(c.lambda_c[0], std::pow(10.0, -1.5), 1e-15);
  EXPECT_DOUBLE_EQ(c.lambda_c[1], 8.0);
}

TEST(ConfigParse, ErrorsNameTheKey) {
  const std::string base = "[problem]\nfamily = logreg\n";
  EXPECT_NE(parse_error(base + "[dripalm]\nrho = 1.5\n").find("rho"), std::string::npos);
  EXPECT_NE(parse_error(base + "agents = x\n[dripalm]\n").find("agents"), std::string::npos);
  EXPECT_NE(parse_error(base + "bogus = 1\n[dripalm]\n").find("bogus"), std::string::npos);
  EXPECT_NE(parse_error(base + "[topology]\nkinds = torus\n[dripalm]\n").find("kinds"),
            std::string::npos);
  EXPECT_NE(parse_error(base + "[weird]\n").find("weird"), std::string::npos);
  EXPECT_NE(parse_error(base + "[weird]\nx = 1\n").find("weird"), std::string::npos);
  EXPECT_NE(parse_error(base).find("solver"), std::string::npos);
  EXPECT_FALSE(parse_error("[dripalm]\n").empty());
  EXPECT_FALSE(parse_error("[problem]\nfamily = lasso\n[ideal]\n").empty());
}

TEST(ConfigParse, ShippedPresetsLoad) {
  for (const char* name : {"table1.cfg", "table1-small.cfg", "table2.cfg", "table2-small.cfg"}) {
    ExperimentConfig c = load_experiment_config(std::filesystem::path(DRIPALM_CONFIG_DIR) / name);
    EXPECT_TRUE(c.dripalm) << name;
  }
  ExperimentConfig t1 = load_experiment_config(std::filesystem::path(DRIPALM_CONFIG_DIR) /
                                               "table1.cfg");
  EXPECT_EQ(t1.dripalm->rho.size(), 8u);
  EXPECT_EQ(t1.repetitions, 10);
  ExperimentConfig t2 = load_experiment_config(std::filesystem::path(DRIPALM_CONFIG_DIR) /
                                               "table2.cfg");
  EXPECT_EQ(t2.topologies.size(), 3u);
  EXPECT_EQ(t2.lambda_c.size(), 3u);
}

TEST(RunExperiment, RowLayoutAndMeans) {
  std::vector<ResultRow> rows = run_experiment(parse(kTinyLogreg));
  // 2 rho + 2 ideal settings, 2 replicates each, plus one mean per setting.
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].solver, "dripalm");
  EXPECT_EQ(rows[0].param1, "rho=0.5");
  EXPECT_EQ(rows[0].param2, "topology=ring;lambda=0.01");
  EXPECT_EQ(rows[0].replicate, "0");
  EXPECT_EQ(rows[2].replicate, "mean");
  EXPECT_DOUBLE_EQ(rows[2].vector_rounds, 0.5 * (rows[0].vector_rounds + rows[1].vector_rounds));
  EXPECT_EQ(rows[6].solver, "ideal");
  for (const auto& r : rows) EXPECT_EQ(r.wall_time_ms, 0.0);
  EXPECT_TRUE(compare_table(rows).mismatches.empty());
}

TEST(RunExperiment, ScenarioGrid) {
  std::vector<ResultRow> rows = run_experiment(parse(kTinyLasso));
  int means = 0;
  for (const auto& r : rows) means += r.replicate == "mean";
  // 3 topologies x 2 lambda_c x 3 solvers.
  EXPECT_EQ(means, 18);
  EXPECT_EQ(rows.size(), 36u);
  EXPECT_EQ(rows[0].param2, "topology=ring;lambda_c=0.1");
}

TEST(RunExperiment, DeterministicAcrossJobCounts) {
  ExperimentConfig c = parse(kTinyLogreg);
  RunOptions one;
  RunOptions three;
  three.jobs = 3;
  const std::string a = to_csv(run_experiment(c, one));
  EXPECT_EQ(a, to_csv(run_experiment(c, one)));
  EXPECT_EQ(a, to_csv(run_experiment(c, three)));

  RunOptions other;
  other.seed = 99;
  EXPECT_NE(a, to_csv(run_experiment(c, other)));
}

ResultRow row(const std::string& solver, const std::string& p1, const std::string& rep,
              double rounds) {
  ResultRow r;
  r.solver = solver;
  r.param1 = p1;
  r.param2 = "topology=ring";
  r.replicate = rep;
  r.vector_rounds = rounds;
  r.scalar_rounds = 2 * rounds;
  r.outer_iters = 3;
  r.kkt = 1e-7;
  r.status = "converged";
  return r;
}

TEST(Csv, HeaderAndRoundTrip) {
  std::vector<ResultRow> rows = {row("dripalm", "rho=0.5", "0", 10),
                                 row("dripalm", "rho=0.5", "mean", 10)};
  rows[0].kkt = 0.1 + 0.2;
  rows[0].param2 = "topology=ring;lambda_c=0.01";
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::istringstream in(text);
  std::vector<ResultRow> back = read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].kkt, rows[0].kkt);
  EXPECT_EQ(back[0].param2, rows[0].param2);
  EXPECT_EQ(to_csv(back), text);
}

TEST(Csv, MalformedInputNamesTheLine) {
  std::istringstream in(std::string(kCsvHeader) + "\nfoo,bar\n");
  try {
    read_csv(in);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(Table, MeansAndOrdering) {
  std::vector<ResultRow> rows = {row("dripalm", "rho=0.1", "0", 10),
                                 row("dripalm", "rho=0.1", "1", 20),
                                 row("dripalm", "rho=0.9", "0", 4)};
  std::vector<ResultRow> means = recompute_means(rows);
  ASSERT_EQ(means.size(), 2u);
  EXPECT_DOUBLE_EQ(means[0].vector_rounds, 15.0);
  EXPECT_EQ(means[0].replicate, "mean");

  TableReport t = compare_table(rows);
  EXPECT_TRUE(t.mismatches.empty());
  EXPECT_LT(t.text.find("rho=0.9"), t.text.find("rho=0.1"));

  rows.push_back(row("dripalm", "rho=0.1", "mean", 16));
  EXPECT_EQ(compare_table(rows).mismatches.size(), 1u);
}

TEST(Table, EmptyInputGivesHeaderOnly) {
  TableReport t = compare_table({});
  EXPECT_NE(t.text.find("solver"), std::string::npos);
  EXPECT_EQ(std::count(t.text.begin(), t.text.end(), '\n'), 2);
}

TEST(GeneratorParams, KeyValues) {
  LogregParams l = parse_logreg_params({"agents=4", "dim=7", "lambda=0.5"});
  EXPECT_EQ(l.agents, 4);
  EXPECT_EQ(l.dim, 7);
  EXPECT_EQ(l.samples, 400);
  EXPECT_DOUBLE_EQ(l.lambda, 0.5);
  LassoParams s = parse_lasso_params({"lambda_c=10^-2", "seed=5"});
  EXPECT_DOUBLE_EQ(s.lambda_c, 0.01);
  EXPECT_EQ(s.seed, 5u);
  EXPECT_THROW(parse_logreg_params({"lambda_c=1"}), ConfigError);
  EXPECT_THROW(parse_lasso_params({"dim"}), ConfigError);
  EXPECT_THROW(parse_lasso_params({"dim=-3"}), ConfigError);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.99), "0.99");
  EXPECT_EQ(format_number(1e-6), "1e-06");
  EXPECT_EQ(format_number(3.0), "3");
  for (double v : {0.1 + 0.2, 1.0 / 3.0, 12345.678, -2.5e-300}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

}  // namespace
}  // namespace dripalm
