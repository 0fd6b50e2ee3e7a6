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

// Synchronous round-based simulation of the agent network. Solvers see other
// agents' data only through neighbor_exchange() and the allreduce calls, and
// every such call is counted.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dripalm/netgraph.hpp"
#include "dripalm/stacked_vector.hpp"

namespace dripalm {

struct CommCounts {
  std::int64_t vector_rounds = 0;
  std::int64_t scalar_rounds = 0;
  friend bool operator==(const CommCounts&, const CommCounts&) = default;
};

/// Communication accounting. `vector_rounds` is the neighbor-exchange count
/// reported as comm.(#); stopping-test traffic is tallied apart in `stopping`
/// unless the network is told to charge it.
struct CommStats {
  std::int64_t vector_rounds = 0;
  std::int64_t scalar_rounds = 0;
  CommCounts stopping;
  std::map<std::string, CommCounts> per_solver;
};

inline constexpr std::size_t kMaxAllreduceArity = 8;

/// Messages one exchange delivered: agent i may read block j only if j is a
/// neighbor of i.
class NeighborViews {
 public:
  NeighborViews(const Graph& graph, StackedVector mailbox)
      : graph_(&graph), mailbox_(std::move(mailbox)) {}

  const std::vector<int>& senders(int agent) const {
    return graph_->neighbors(agent);
  }
  /// Block sent by `from` as received at `agent`. Throws for non-neighbors.
  ConstBlock received(int agent, int from) const;

 private:
  const Graph* graph_;
  StackedVector mailbox_;
};

class SimNetwork {
 public:
  /// Validates W against the graph (throws MixingMatrixError).
  SimNetwork(Graph graph, MixingMatrix mixing, int dim);

  const Graph& graph() const { return graph_; }
  const MixingMatrix& mixing() const { return mixing_; }
  const SpectralReport& spectral() const { return spectral_; }
  int agents() const { return graph_.size(); }
  int dim() const { return dim_; }

  /// One synchronous round: every agent sends its block to all neighbors.
  NeighborViews neighbor_exchange(const StackedVector& x);

  /// Local combination after an exchange; no communication.
  StackedVector combine_W(const NeighborViews& views, const StackedVector& x) const;
  StackedVector combine_Z(const NeighborViews& views, const StackedVector& x) const;

  /// Agent i's share (1/2) sum_j w_ij ||x_i - x_j||^2 of <x, Zx>; the shares
  /// are nonnegative and sum to ||sqrt(Z) x||^2. No communication.
  std::vector<double> local_disagreement(const NeighborViews& views,
                                         const StackedVector& x) const;

  /// Exchange followed by the local combination (one vector round). The
  /// disagreement shares of the same exchange are written when requested.
  StackedVector exchange_apply_Z(const StackedVector& x,
                                 std::vector<double>* disagreement = nullptr);
  /// Disagreement shares alone (one vector round).
  std::vector<double> exchange_disagreement(const StackedVector& x);
  StackedVector exchange_apply_W(const StackedVector& x);

  /// Every agent obtains sum_i locals[i], summed in agent-index order.
  template <std::size_t K>
  std::array<double, K> scalar_allreduce(std::span<const std::array<double, K>> locals) {
    static_assert(K >= 1 && K <= kMaxAllreduceArity, "allreduce arity is 1..8");
    require_agents(locals.size());
    std::array<double, K> total{};
    for (const auto& tuple : locals) {
      for (std::size_t c = 0; c < K; ++c) total[c] += tuple[c];
    }
    charge_scalar();
    return total;
  }
  template <std::size_t K>
  std::array<double, K> scalar_allreduce(const std::vector<std::array<double, K>>& locals) {
    return scalar_allreduce(std::span<const std::array<double, K>>(locals));
  }

  /// Network-wide sum of d-dimensional blocks, visible to every agent.
  /// Charged as one vector round.
  Vector vector_allreduce(const StackedVector& x);

  CommStats comm_report() const { return stats_; }

  /// When true, stopping-test traffic also counts toward the main counters.
  void set_charge_stopping_checks(bool charge) { charge_stopping_ = charge; }
  bool charge_stopping_checks() const { return charge_stopping_; }

  /// While alive, traffic is recorded as stopping-test traffic.
  class StoppingCheckScope {
   public:
    explicit StoppingCheckScope(SimNetwork& net) : net_(net), prev_(net.in_stopping_) {
      net_.in_stopping_ = true;
    }
    ~StoppingCheckScope() { net_.in_stopping_ = prev_; }
    StoppingCheckScope(const StoppingCheckScope&) = delete;
    StoppingCheckScope& operator=(const StoppingCheckScope&) = delete;

   private:
    SimNetwork& net_;
    bool prev_;
  };

  /// While alive, traffic is also attributed to `label` in per_solver.
  class SolverScope {
   public:
    SolverScope(SimNetwork& net, std::string label) : net_(net), prev_(net.label_) {
      net_.label_ = std::move(label);
    }
    ~SolverScope() { net_.label_ = prev_; }
    SolverScope(const SolverScope&) = delete;
    SolverScope& operator=(const SolverScope&) = delete;

   private:
    SimNetwork& net_;
    std::string prev_;
  };

 private:
  void require_agents(std::size_t count) const;
  void require_shape(const StackedVector& x) const;
  void charge_vector();
  void charge_scalar();

  Graph graph_;
  MixingMatrix mixing_;
  SpectralReport spectral_;
  int dim_;
  CommStats stats_;
  bool charge_stopping_ = false;
  bool in_stopping_ = false;
  std::string label_;
};

/// Graph + Metropolis weights + validation in one step.
SimNetwork make_metropolis_network(Graph graph, int dim);

}  // namespace dripalm
