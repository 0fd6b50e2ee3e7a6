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

// bench: run experiment configs, print comparison tables, generate problems.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dripalm/experiment.hpp"
#include "dripalm/problem_io.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed, int jobs, bool wall_time,
            bool quiet) {
  const dripalm::ExperimentConfig config = dripalm::load_experiment_config(config_path);
  dripalm::RunOptions options;
  options.seed = seed;
  options.jobs = jobs;
  options.wall_time = wall_time;
  options.log = quiet ? nullptr : &std::cerr;
  const auto rows = dripalm::run_experiment(config, options);

  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / (config.name + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  dripalm::write_csv(out, rows);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  std::cout << path.string() << '\n';
  return 0;
}

int cmd_table(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  const auto report = dripalm::compare_table(dripalm::read_csv(in));
  std::cout << report.text;
  for (const auto& m : report.mismatches) {
    std::cerr << "warning: stored mean disagrees with detail rows: " << m << '\n';
  }
  return report.mismatches.empty() ? 0 : 2;
}

int cmd_gen(const std::string& family, const std::vector<std::string>& params,
            std::string out_dir) {
  dripalm::ProblemInstance problem;
  if (family == "logreg") {
    problem = dripalm::gen_logreg(dripalm::parse_logreg_params(params));
  } else {
    problem = dripalm::gen_lasso(dripalm::parse_lasso_params(params));
  }
  if (out_dir.empty()) {
    out_dir = family + "_seed" + std::to_string(problem.meta.seed);
  }
  dripalm::save_problem(problem, out_dir);
  std::cout << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized ALM experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool wall_time = false;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment config and write a CSV");
  run->add_option("config", config_path, "Experiment config file")->required()->check(
      CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the config's seed_base");
  run->add_option("--jobs", jobs, "Replicates run in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_flag("--wall-time", wall_time, "Record wall time (makes CSVs nondeterministic)");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  std::string csv_path;
  auto* table = app.add_subcommand("table", "Print a comparison table from a CSV");
  table->add_option("csv", csv_path, "Result CSV")->required()->check(CLI::ExistingFile);

  std::string family;
  std::vector<std::string> params;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic problem instance");
  gen->add_option("family", family, "logreg or lasso")
      ->required()
      ->check(CLI::IsMember({"logreg", "lasso"}));
  gen->add_option("params", params, "key=value generator parameters");
  gen->add_option("--out", gen_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, seed, jobs, wall_time, quiet);
    if (*table) return cmd_table(csv_path);
    if (*gen) return cmd_gen(family, params, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
