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

#include "dripalm/stacked_vector.hpp"

#include <stdexcept>
#include <string>

namespace dripalm {
namespace {

void require_same_shape(const StackedVector& a, const StackedVector& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(
        "stacked vector shape mismatch: " + std::to_string(a.agents()) + "x" +
        std::to_string(a.dim()) + " vs " + std::to_string(b.agents()) + "x" +
        std::to_string(b.dim()));
  }
}

}  // namespace

StackedVector::StackedVector(int agents, int dim) {
  if (agents < 0 || dim < 0) {
    throw std::invalid_argument("stacked vector dimensions must be nonnegative");
  }
  data_ = Matrix::Zero(dim, agents);
}

StackedVector StackedVector::consensus(int agents, const Vector& value) {
  StackedVector out(agents, static_cast<int>(value.size()));
  out.data_.colwise() = value;
  return out;
}

StackedVector StackedVector::from_flat(int agents, int dim, const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(agents) * dim) {
    throw std::invalid_argument("flat vector length does not equal agents*dim");
  }
  StackedVector out(agents, dim);
  out.data_ = Eigen::Map<const Matrix>(flat.data(), dim, agents);
  return out;
}

Vector StackedVector::flat() const {
  return Eigen::Map<const Vector>(data_.data(), data_.size());
}

double StackedVector::dot(const StackedVector& other) const {
  require_same_shape(*this, other);
  double total = 0.0;
  for (int i = 0; i < agents(); ++i) total += block(i).dot(other.block(i));
  return total;
}

Vector StackedVector::block_sum() const {
  Vector sum = Vector::Zero(dim());
  for (int i = 0; i < agents(); ++i) sum += block(i);
  return sum;
}

Vector StackedVector::average() const {
  if (agents() == 0) return Vector::Zero(dim());
  return block_sum() / static_cast<double>(agents());
}

StackedVector& StackedVector::operator+=(const StackedVector& rhs) {
  require_same_shape(*this, rhs);
  data_ += rhs.data_;
  return *this;
}

StackedVector& StackedVector::operator-=(const StackedVector& rhs) {
  require_same_shape(*this, rhs);
  data_ -= rhs.data_;
  return *this;
}

StackedVector& StackedVector::operator*=(double scale) {
  data_ *= scale;
  return *this;
}

}  // namespace dripalm
