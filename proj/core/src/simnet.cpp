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

#include "dripalm/simnet.hpp"

#include <stdexcept>

namespace dripalm {

ConstBlock NeighborViews::received(int agent, int from) const {
  if (!graph_->has_edge(agent, from)) {
    throw std::logic_error("agent " + std::to_string(agent) +
                           " has no link to agent " + std::to_string(from));
  }
  return mailbox_.block(from);
}

SimNetwork::SimNetwork(Graph graph, MixingMatrix mixing, int dim)
    : graph_(std::move(graph)), mixing_(std::move(mixing)), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("block dimension must be >= 1");
  spectral_ = validate_mixing(mixing_, graph_);
}

void SimNetwork::require_agents(std::size_t count) const {
  if (count != static_cast<std::size_t>(agents())) {
    throw std::invalid_argument("expected one entry per agent (" +
                                std::to_string(agents()) + "), got " +
                                std::to_string(count));
  }
}

void SimNetwork::require_shape(const StackedVector& x) const {
  if (x.agents() != agents() || x.dim() != dim_) {
    throw std::invalid_argument("stacked vector does not match the network");
  }
}

void SimNetwork::charge_vector() {
  if (in_stopping_) {
    ++stats_.stopping.vector_rounds;
    if (!charge_stopping_) return;
  }
  ++stats_.vector_rounds;
  if (!label_.empty()) ++stats_.per_solver[label_].vector_rounds;
}

void SimNetwork::charge_scalar() {
  if (in_stopping_) {
    ++stats_.stopping.scalar_rounds;
    if (!charge_stopping_) return;
  }
  ++stats_.scalar_rounds;
  if (!label_.empty()) ++stats_.per_solver[label_].scalar_rounds;
}

NeighborViews SimNetwork::neighbor_exchange(const StackedVector& x) {
  require_shape(x);
  charge_vector();
  return NeighborViews(graph_, x);
}

// Same accumulation order as apply_W so both routes agree bitwise.
StackedVector SimNetwork::combine_W(const NeighborViews& views,
                                    const StackedVector& x) const {
  require_shape(x);
  StackedVector out(agents(), dim_);
  for (int i = 0; i < agents(); ++i) {
    auto mixed = out.block(i);
    mixed = mixing_(i, i) * x.block(i);
    for (int j : mixing_.support(i)) mixed += mixing_(i, j) * views.received(i, j);
  }
  return out;
}

// Same difference form as apply_Z, so both routes agree bitwise.
StackedVector SimNetwork::combine_Z(const NeighborViews& views,
                                    const StackedVector& x) const {
  require_shape(x);
  StackedVector out(agents(), dim_);
  for (int i = 0; i < agents(); ++i) {
    auto z = out.block(i);
    for (int j : mixing_.support(i)) z += mixing_(i, j) * (x.block(i) - views.received(i, j));
  }
  return out;
}

std::vector<double> SimNetwork::local_disagreement(const NeighborViews& views,
                                                   const StackedVector& x) const {
  require_shape(x);
  std::vector<double> out(static_cast<std::size_t>(agents()), 0.0);
  for (int i = 0; i < agents(); ++i) {
    for (int j : mixing_.support(i)) {
      out[i] += 0.5 * mixing_(i, j) * (x.block(i) - views.received(i, j)).squaredNorm();
    }
  }
  return out;
}

StackedVector SimNetwork::exchange_apply_Z(const StackedVector& x,
                                           std::vector<double>* disagreement) {
  const NeighborViews views = neighbor_exchange(x);
  if (disagreement) *disagreement = local_disagreement(views, x);
  return combine_Z(views, x);
}

std::vector<double> SimNetwork::exchange_disagreement(const StackedVector& x) {
  return local_disagreement(neighbor_exchange(x), x);
}

StackedVector SimNetwork::exchange_apply_W(const StackedVector& x) {
  return combine_W(neighbor_exchange(x), x);
}

Vector SimNetwork::vector_allreduce(const StackedVector& x) {
  require_shape(x);
  charge_vector();
  return x.block_sum();
}

SimNetwork make_metropolis_network(Graph graph, int dim) {
  MixingMatrix w = metropolis_weights(graph);
  return SimNetwork(std::move(graph), std::move(w), dim);
}

}  // namespace dripalm
