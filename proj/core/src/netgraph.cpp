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

#include "dripalm/netgraph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dripalm/random.hpp"

namespace dripalm {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kSpectralTol = 1e-12;

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

std::vector<std::pair<int, int>> ring_edges(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    if (n == 2 && i == 1) break;  // a 2-ring is a single edge
    edges.emplace_back(i, j);
  }
  return edges;
}

std::vector<std::pair<int, int>> erdos_renyi_edges(int n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::vector<std::pair<int, int>> geometric_edges(int n, double radius,
                                                 Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 2>> points(n);
  for (auto& p : points) {
    p[0] = unit(rng);
    p[1] = unit(rng);
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = points[i][0] - points[j][0];
      double dy = points[i][1] - points[j][1];
      if (std::hypot(dx, dy) <= radius) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges,
             std::uint64_t seed)
    : n_(n), seed_(seed), adjacency_(std::max(n, 0)) {
  if (n < 1) throw std::invalid_argument("graph needs at least one agent");
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw std::invalid_argument("edge endpoint out of range: (" +
                                  std::to_string(a) + ", " +
                                  std::to_string(b) + ")");
    }
    if (a == b) {
      throw std::invalid_argument("self-loop at agent " + std::to_string(a));
    }
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate edge in graph");
  }
  for (const Edge& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

bool Graph::has_edge(int a, int b) const {
  if (a < 0 || a >= n_) return false;
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

bool Graph::connected() const {
  DisjointSets sets(n_);
  int components = n_;
  for (const Edge& e : edges_) {
    if (sets.unite(e.u, e.v)) --components;
  }
  return components == 1;
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kRing:
      return "ring";
    case TopologyKind::kErdosRenyi:
      return "erdos_renyi";
    case TopologyKind::kGeometric:
      return "geometric";
  }
  return "unknown";
}

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "ring") return TopologyKind::kRing;
  if (name == "erdos_renyi" || name == "er") return TopologyKind::kErdosRenyi;
  if (name == "geometric") return TopologyKind::kGeometric;
  throw std::invalid_argument("unknown topology '" + name +
                              "' (expected ring, erdos_renyi or geometric)");
}

std::string TopologySpec::name() const { return to_string(kind); }

Graph build_topology(const TopologySpec& spec, int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("topology needs n >= 2");
  switch (spec.kind) {
    case TopologyKind::kRing:
      return Graph(n, ring_edges(n), seed);
    case TopologyKind::kErdosRenyi:
      if (!(spec.probability > 0.0 && spec.probability <= 1.0)) {
        throw std::invalid_argument("Erdos-Renyi probability must be in (0, 1]");
      }
      break;
    case TopologyKind::kGeometric:
      if (spec.radius && !(*spec.radius > 0.0)) {
        throw std::invalid_argument("geometric radius must be positive");
      }
      break;
  }
  const double radius =
      spec.radius.value_or(std::sqrt(2.0 * std::log(static_cast<double>(n)) / n));
  for (int attempt = 0; attempt < kMaxTopologyRedraws; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    auto edges = spec.kind == TopologyKind::kErdosRenyi
                     ? erdos_renyi_edges(n, spec.probability, rng)
                     : geometric_edges(n, radius, rng);
    Graph g(n, edges, seed);
    if (g.connected()) return g;
  }
  throw TopologyError("no connected " + spec.name() + " graph on " +
                      std::to_string(n) + " agents after " +
                      std::to_string(kMaxTopologyRedraws) +
                      " redraws; parameters too sparse");
}

MixingMatrix::MixingMatrix(Matrix weights) : weights_(std::move(weights)) {
  const int n = static_cast<int>(weights_.rows());
  support_.resize(weights_.rows() == weights_.cols() ? n : 0);
  for (int i = 0; i < static_cast<int>(support_.size()); ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && weights_(i, j) != 0.0) support_[i].push_back(j);
    }
  }
}

MixingMatrix metropolis_weights(const Graph& graph) {
  const int n = graph.size();
  Matrix w = Matrix::Zero(n, n);
  for (const Edge& e : graph.edges()) {
    double weight =
        1.0 / (1.0 + std::max(graph.degree(e.u), graph.degree(e.v)));
    w(e.u, e.v) = weight;
    w(e.v, e.u) = weight;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : graph.neighbors(i)) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return MixingMatrix(std::move(w));
}

std::string to_string(MixingViolation violation) {
  switch (violation) {
    case MixingViolation::kNotSquare:
      return "not square";
    case MixingViolation::kNegativeEntry:
      return "negative entry";
    case MixingViolation::kOffGraphEntry:
      return "nonzero weight off the edge set";
    case MixingViolation::kAsymmetric:
      return "not symmetric";
    case MixingViolation::kNotStochastic:
      return "not doubly stochastic";
    case MixingViolation::kSpectralBound:
      return "eigenvalue outside (-1, 1]";
    case MixingViolation::kNoMixing:
      return "second eigenvalue equals 1";
  }
  return "unknown";
}

MixingMatrixError::MixingMatrixError(MixingViolation violation,
                                     const std::string& detail)
    : std::invalid_argument("invalid mixing matrix (" + to_string(violation) +
                            "): " + detail),
      violation_(violation) {}

SpectralReport validate_mixing(const MixingMatrix& mixing, const Graph& graph) {
  const Matrix& w = mixing.weights();
  if (w.rows() != w.cols() || w.rows() != graph.size()) {
    throw MixingMatrixError(MixingViolation::kNotSquare,
                            "expected " + std::to_string(graph.size()) + "x" +
                                std::to_string(graph.size()));
  }
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (w(i, j) < 0.0) {
        throw MixingMatrixError(MixingViolation::kNegativeEntry,
                                "w(" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") < 0");
      }
      if (i != j && w(i, j) != 0.0 && !graph.has_edge(i, j)) {
        throw MixingMatrixError(MixingViolation::kOffGraphEntry,
                                "w(" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") != 0");
      }
    }
  }
  if (w != w.transpose()) {
    throw MixingMatrixError(MixingViolation::kAsymmetric, "W != W^T");
  }
  for (int i = 0; i < n; ++i) {
    double row = w.row(i).sum();
    if (std::abs(row - 1.0) > kRowSumTol) {
      std::ostringstream msg;
      msg << "row " << i + 1 << " sums to " << std::setprecision(17) << row;
      throw MixingMatrixError(MixingViolation::kNotStochastic, msg.str());
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(w, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();  // ascending
  const double lambda_n = ev(0);
  const double lambda_1 = ev(n - 1);
  const double lambda_2 = n > 1 ? ev(n - 2) : lambda_n;
  if (lambda_n <= -1.0 + kSpectralTol || lambda_1 > 1.0 + kSpectralTol) {
    std::ostringstream msg;
    msg << "spectrum [" << lambda_n << ", " << lambda_1 << "]";
    throw MixingMatrixError(MixingViolation::kSpectralBound, msg.str());
  }
  if (n > 1 && lambda_2 >= 1.0 - kSpectralTol) {
    throw MixingMatrixError(MixingViolation::kNoMixing,
                            "lambda_2(W) = 1, information never mixes");
  }
  SpectralReport report;
  report.varsigma = std::max(std::abs(lambda_2), std::abs(lambda_n));
  report.condition = (1.0 + report.varsigma) / (1.0 - report.varsigma);
  report.lambda_min_plus_z = 1.0 - lambda_2;
  report.lambda_max_z = 1.0 - lambda_n;
  return report;
}

namespace {

void require_blocks(const StackedVector& x, const MixingMatrix& mixing) {
  if (x.agents() != mixing.size()) {
    throw std::invalid_argument("stacked vector has " +
                                std::to_string(x.agents()) +
                                " blocks but mixing matrix is " +
                                std::to_string(mixing.size()) + "x" +
                                std::to_string(mixing.size()));
  }
}

}  // namespace

StackedVector apply_W(const StackedVector& x, const MixingMatrix& mixing) {
  require_blocks(x, mixing);
  StackedVector out(x.agents(), x.dim());
  for (int i = 0; i < x.agents(); ++i) {
    auto mixed = out.block(i);
    mixed = mixing(i, i) * x.block(i);
    for (int j : mixing.support(i)) mixed += mixing(i, j) * x.block(j);
  }
  return out;
}

// Difference form sum_j w_ij (x_i - x_j): exact for consensus inputs and free
// of the cancellation in x - Wx near consensus.
StackedVector apply_Z(const StackedVector& x, const MixingMatrix& mixing) {
  require_blocks(x, mixing);
  StackedVector out(x.agents(), x.dim());
  for (int i = 0; i < x.agents(); ++i) {
    auto z = out.block(i);
    for (int j : mixing.support(i)) z += mixing(i, j) * (x.block(i) - x.block(j));
  }
  return out;
}

double quadratic_Z(const StackedVector& x, const StackedVector& zx) {
  return std::max(0.0, x.dot(zx));
}

double quadratic_Z(const StackedVector& x, const MixingMatrix& mixing) {
  require_blocks(x, mixing);
  double total = 0.0;
  for (int i = 0; i < x.agents(); ++i) {
    for (int j : mixing.support(i)) {
      total += 0.5 * mixing(i, j) * (x.block(i) - x.block(j)).squaredNorm();
    }
  }
  return total;
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << graph.size() << ' ' << graph.edges().size() << '\n';
  for (const Edge& e : graph.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

Graph read_edge_list(std::istream& in) {
  long n = 0;
  long m = 0;
  if (!(in >> n >> m) || n < 1 || m < 0) {
    throw std::invalid_argument("edge list: bad header, expected \"n m\"");
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (long k = 0; k < m; ++k) {
    long a = 0;
    long b = 0;
    if (!(in >> a >> b)) {
      throw std::invalid_argument("edge list: expected " + std::to_string(m) +
                                  " edges, read " + std::to_string(k));
    }
    edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
  }
  return Graph(static_cast<int>(n), edges);
}

void write_dense(std::ostream& out, const MixingMatrix& mixing) {
  const int n = mixing.size();
  out << n << '\n' << std::setprecision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? " " : "") << mixing(i, j);
    out << '\n';
  }
}

MixingMatrix read_dense(std::istream& in) {
  long n = 0;
  if (!(in >> n) || n < 1) {
    throw std::invalid_argument("dense matrix: bad size header");
  }
  Matrix w(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (!(in >> w(i, j))) {
        throw std::invalid_argument("dense matrix: truncated at row " +
                                    std::to_string(i + 1));
      }
    }
  }
  return MixingMatrix(std::move(w));
}

}  // namespace dripalm
