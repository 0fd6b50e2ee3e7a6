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

// Communication topologies, Metropolis mixing matrices and the block-wise
// consensus operator Z = (I - W) (x) I_d.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dripalm/stacked_vector.hpp"

namespace dripalm {

/// Undirected edge with 0-based endpoints, normalized so that u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on agents {0, ..., n-1}. Rejects self-loops,
/// duplicate edges and out-of-range endpoints. Connectivity is not enforced
/// by the constructor; see connected().
class Graph {
 public:
  Graph() = default;
  Graph(int n, const std::vector<std::pair<int, int>>& edges,
        std::uint64_t seed = 0);

  int size() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int agent) const {
    return adjacency_.at(agent);
  }
  int degree(int agent) const {
    return static_cast<int>(adjacency_.at(agent).size());
  }
  bool has_edge(int a, int b) const;
  bool connected() const;

 private:
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

enum class TopologyKind { kRing, kErdosRenyi, kGeometric };

struct TopologySpec {
  TopologyKind kind = TopologyKind::kRing;
  double probability = 0.2;       // Erdos-Renyi edge probability.
  std::optional<double> radius;   // Geometric; default sqrt(2 ln n / n).

  static TopologySpec ring() { return {TopologyKind::kRing, 0.2, {}}; }
  static TopologySpec erdos_renyi(double p) {
    return {TopologyKind::kErdosRenyi, p, {}};
  }
  static TopologySpec geometric(std::optional<double> r = {}) {
    return {TopologyKind::kGeometric, 0.2, r};
  }

  std::string name() const;
};

std::string to_string(TopologyKind kind);
TopologyKind parse_topology_kind(const std::string& name);

/// Thrown when random generation cannot produce a connected graph.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxTopologyRedraws = 1000;

/// Ring, Erdos-Renyi or random geometric graph on n agents. Random kinds are
/// redrawn with derived seeds until connected, at most kMaxTopologyRedraws
/// times. Deterministic in `seed`.
Graph build_topology(const TopologySpec& spec, int n, std::uint64_t seed);

/// Symmetric weight matrix aligned with a communication graph. `support`
/// lists, for every agent, the other agents j with w_ij != 0.
class MixingMatrix {
 public:
  MixingMatrix() = default;
  explicit MixingMatrix(Matrix weights);

  int size() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double operator()(int i, int j) const { return weights_(i, j); }
  const std::vector<int>& support(int agent) const {
    return support_.at(agent);
  }

 private:
  Matrix weights_;
  std::vector<std::vector<int>> support_;
};

/// w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, w_ii = 1 - sum_j w_ij.
MixingMatrix metropolis_weights(const Graph& graph);

struct SpectralReport {
  double varsigma = 0.0;        // max(|lambda_2(W)|, |lambda_n(W)|)
  double condition = 1.0;       // (1 + varsigma) / (1 - varsigma)
  double lambda_min_plus_z = 0.0;  // 1 - lambda_2(W)
  double lambda_max_z = 0.0;       // 1 - lambda_n(W)
};

enum class MixingViolation {
  kNotSquare,
  kNegativeEntry,
  kOffGraphEntry,     // (i) decentralization
  kAsymmetric,        // (ii) symmetry
  kNotStochastic,     // (iii) double stochasticity
  kSpectralBound,     // (iv) -I < W <= I
  kNoMixing,          // lambda_2(W) = 1: W does not mix over the graph
};

std::string to_string(MixingViolation violation);

class MixingMatrixError : public std::invalid_argument {
 public:
  MixingMatrixError(MixingViolation violation, const std::string& detail);
  MixingViolation violation() const { return violation_; }

 private:
  MixingViolation violation_;
};

/// Checks W against the graph and returns its spectral summary. Throws
/// MixingMatrixError naming the first violated condition.
SpectralReport validate_mixing(const MixingMatrix& mixing, const Graph& graph);

/// [Zx]_i = x_i - sum_{j in N_i + {i}} w_ij x_j, using only neighbor blocks.
StackedVector apply_Z(const StackedVector& x, const MixingMatrix& mixing);

/// [Wx]_i = sum_{j in N_i + {i}} w_ij x_j.
StackedVector apply_W(const StackedVector& x, const MixingMatrix& mixing);

/// <x, Zx> = ||sqrt(Z) x||^2, evaluated as the edge sum
/// (1/2) sum_i sum_j w_ij ||x_i - x_j||^2, which is nonnegative and accurate
/// near consensus.
double quadratic_Z(const StackedVector& x, const MixingMatrix& mixing);

/// Sum of local inner products <x_i, [Zx]_i>, clamped as in quadratic_Z.
double quadratic_Z(const StackedVector& x, const StackedVector& zx);

// Edge-list text format: "n m" then m lines "i j" with 1-based endpoints.
void write_edge_list(std::ostream& out, const Graph& graph);
Graph read_edge_list(std::istream& in);

// Dense text matrix: "n" then n rows of n values.
void write_dense(std::ostream& out, const MixingMatrix& mixing);
MixingMatrix read_dense(std::istream& in);

}  // namespace dripalm
