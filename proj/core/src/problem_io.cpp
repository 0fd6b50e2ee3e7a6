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

#include "dripalm/problem_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace dripalm {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

constexpr std::array<char, 8> kMagic = {'D', 'R', 'M', 'A', 'T', '0', '0', '1'};

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string agent_file(int agent, const char* role) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "agent_%03d_%s.bin", agent, role);
  return buf;
}

void write_file(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_binary(out, m);
}

Matrix read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return read_matrix_binary(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_matrix_binary(std::ostream& out, const Matrix& m) {
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = m;
  out.write(reinterpret_cast<const char*>(row_major.data()),
            static_cast<std::streamsize>(row_major.size() * sizeof(double)));
  if (!out) throw std::runtime_error("binary matrix write failed");
}

Matrix read_matrix_binary(std::istream& in) {
  std::array<char, 8> magic{};
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("bad matrix magic");
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in) throw std::runtime_error("truncated matrix header");
  if (rows > (1u << 28) || cols > (1u << 28) || rows * cols > (1ull << 31)) {
    throw std::runtime_error("implausible matrix dimensions");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated matrix payload");
  return m;
}

void save_problem(const ProblemInstance& problem,
                  const std::filesystem::path& dir) {
  if (problem.meta.family == ProblemFamily::kCustom) {
    throw std::invalid_argument("only generated logreg/lasso problems can be saved");
  }
  std::filesystem::create_directories(dir);
  namespace pt = boost::property_tree;
  pt::ptree tree;
  tree.put("problem.family", to_string(problem.meta.family));
  tree.put("problem.agents", problem.agents);
  tree.put("problem.dim", problem.dim);
  tree.put("problem.lambda", exact(problem.meta.lambda));
  if (problem.meta.lambda_c) {
    tree.put("problem.lambda_c", exact(*problem.meta.lambda_c));
  }
  tree.put("problem.seed", problem.meta.seed);
  tree.put("problem.has_x_true", problem.meta.x_true.size() > 0);
  pt::write_ini((dir / "problem.ini").string(), tree);

  for (int i = 0; i < problem.agents; ++i) {
    write_file(dir / agent_file(i, "data"), problem.meta.data.at(i));
    write_file(dir / agent_file(i, "targets"), problem.meta.targets.at(i));
  }
  if (problem.meta.x_true.size() > 0) {
    write_file(dir / "x_true.bin", problem.meta.x_true);
  }
}

ProblemInstance load_problem(const std::filesystem::path& dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini((dir / "problem.ini").string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error(e.what());
  }
  const auto family = parse_problem_family(tree.get<std::string>("problem.family"));
  const int agents = tree.get<int>("problem.agents");
  const int dim = tree.get<int>("problem.dim");
  const double lambda = tree.get<double>("problem.lambda");
  const auto seed = tree.get<std::uint64_t>("problem.seed", 0);

  std::vector<Matrix> data;
  std::vector<Vector> targets;
  for (int i = 0; i < agents; ++i) {
    data.push_back(read_file(dir / agent_file(i, "data")));
    Matrix t = read_file(dir / agent_file(i, "targets"));
    if (t.cols() != 1) throw std::runtime_error("targets must be a column");
    targets.emplace_back(t.col(0));
    if (data.back().cols() != dim) {
      throw std::runtime_error(agent_file(i, "data") + ": expected " +
                               std::to_string(dim) + " columns");
    }
  }

  ProblemInstance p;
  if (family == ProblemFamily::kLogistic) {
    p = make_logreg_problem(std::move(data), std::move(targets), lambda, seed);
  } else {
    // The stored lambda is authoritative so hand edits take effect.
    p.agents = agents;
    p.dim = dim;
    for (int i = 0; i < agents; ++i) {
      p.locals.push_back(lasso_local(data[i], targets[i], lambda, agents));
    }
    p.meta.family = family;
    p.meta.lambda = lambda;
    if (auto lc = tree.get_optional<double>("problem.lambda_c")) p.meta.lambda_c = *lc;
    p.meta.seed = seed;
    p.meta.data = std::move(data);
    p.meta.targets = std::move(targets);
  }
  if (tree.get<bool>("problem.has_x_true", false)) {
    Matrix xt = read_file(dir / "x_true.bin");
    p.meta.x_true = xt.col(0);
  }
  return p;
}

}  // namespace dripalm
