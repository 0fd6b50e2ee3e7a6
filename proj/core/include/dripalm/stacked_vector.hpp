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

#pragma once

#include <Eigen/Core>

namespace dripalm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstBlock = Eigen::Ref<const Eigen::VectorXd>;
using MutableBlock = Eigen::Ref<Eigen::VectorXd>;

/// Block-partitioned vector in R^{n*d}. Block i is the local copy held by
/// agent i and is stored as column i of a d-by-n column-major matrix, so each
/// block is contiguous and the flattened storage is (x_1; x_2; ...; x_n).
class StackedVector {
 public:
  StackedVector() = default;
  StackedVector(int agents, int dim);

  /// Every block equal to `value`.
  static StackedVector consensus(int agents, const Vector& value);
  static StackedVector from_flat(int agents, int dim, const Vector& flat);

  int agents() const { return static_cast<int>(data_.cols()); }
  int dim() const { return static_cast<int>(data_.rows()); }
  Eigen::Index size() const { return data_.size(); }

  auto block(int agent) { return data_.col(agent); }
  auto block(int agent) const { return data_.col(agent); }

  Matrix& matrix() { return data_; }
  const Matrix& matrix() const { return data_; }
  Vector flat() const;

  double squared_norm() const { return data_.squaredNorm(); }
  double norm() const { return data_.norm(); }
  double dot(const StackedVector& other) const;

  /// Sum of all blocks, in agent-index order.
  Vector block_sum() const;
  Vector average() const;

  bool same_shape(const StackedVector& other) const {
    return agents() == other.agents() && dim() == other.dim();
  }

  void set_zero() { data_.setZero(); }

  StackedVector& operator+=(const StackedVector& rhs);
  StackedVector& operator-=(const StackedVector& rhs);
  StackedVector& operator*=(double scale);

  friend StackedVector operator+(StackedVector lhs, const StackedVector& rhs) {
    return lhs += rhs;
  }
  friend StackedVector operator-(StackedVector lhs, const StackedVector& rhs) {
    return lhs -= rhs;
  }
  friend StackedVector operator*(double scale, StackedVector v) {
    return v *= scale;
  }
  friend bool operator==(const StackedVector& a, const StackedVector& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  Matrix data_;
};

}  // namespace dripalm
