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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dripalm/stacked_vector.hpp"

namespace dripalm {

/// Proper closed convex term with an exact proximal mapping.
struct NonsmoothTerm {
  std::function<double(ConstBlock x)> value;
  /// out = argmin_u { h(u) + ||u - v||^2 / (2 nu) }.
  std::function<void(ConstBlock v, double nu, MutableBlock out)> prox;
};

/// Per-agent oracle f_i = s_i + h_i with s_i convex differentiable and h_i
/// optional.
class LocalObjective {
 public:
  /// Writes the gradient of s_i at x into `grad` and returns s_i(x).
  using SmoothFn = std::function<double(ConstBlock x, MutableBlock grad)>;

  LocalObjective(int dim, SmoothFn smooth,
                 std::optional<NonsmoothTerm> nonsmooth = std::nullopt,
                 std::optional<double> lipschitz_hint = std::nullopt);

  int dim() const { return dim_; }

  double smooth(ConstBlock x, MutableBlock grad) const { return smooth_(x, grad); }
  double smooth_value(ConstBlock x) const;
  Vector smooth_gradient(ConstBlock x) const;

  bool has_nonsmooth() const { return nonsmooth_.has_value(); }
  double nonsmooth_value(ConstBlock x) const;
  /// Identity when there is no nonsmooth part.
  void prox(ConstBlock v, double nu, MutableBlock out) const;

  double value(ConstBlock x) const { return smooth_value(x) + nonsmooth_value(x); }

  /// Lipschitz constant of the smooth gradient, when known.
  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }

 private:
  int dim_;
  SmoothFn smooth_;
  std::optional<NonsmoothTerm> nonsmooth_;
  std::optional<double> lipschitz_hint_;
};

/// f_i(x) = sum_j log(1 + exp(-y_j a_j^T x)) + (lambda / 2) ||x||^2.
LocalObjective logreg_local(Matrix features, Vector labels, double lambda);

/// f_i(x) = 0.5 ||A_i x - b_i||^2 + (lambda / n) ||x||_1.
LocalObjective lasso_local(Matrix a, Vector b, double lambda, int agents);

/// f_i(x) = 0.5 ||x - center||^2. Handy for consensus-averaging checks.
LocalObjective quadratic_local(Vector center);

/// out_k = sign(v_k) max(|v_k| - threshold, 0).
void soft_threshold(ConstBlock v, double threshold, MutableBlock out);

/// Largest eigenvalue of A^T A, computed from the smaller Gram matrix.
double spectral_norm_squared(const Matrix& a);

enum class ProblemFamily { kLogistic, kLasso, kCustom };

std::string to_string(ProblemFamily family);
ProblemFamily parse_problem_family(const std::string& name);

struct ProblemMeta {
  ProblemFamily family = ProblemFamily::kCustom;
  double lambda = 0.0;
  std::optional<double> lambda_c;
  std::uint64_t seed = 0;
  /// Per-agent data: features/labels for logistic, A_i/b_i for LASSO.
  std::vector<Matrix> data;
  std::vector<Vector> targets;
  Vector x_true;
};

/// Consensus problem min sum_i f_i(x) over n agents in R^d.
struct ProblemInstance {
  int agents = 0;
  int dim = 0;
  std::vector<LocalObjective> locals;
  ProblemMeta meta;

  bool smooth() const;
  /// max_i L_i, or nullopt when any agent lacks a hint.
  std::optional<double> max_lipschitz() const;
  /// Modulus of strong convexity of every f_i, when known (logistic: lambda).
  std::optional<double> strong_convexity() const;
  /// F(x) = sum_i f_i(x_i).
  double value(const StackedVector& x) const;
  /// sum_i f_i(x) at a single point.
  double centralized_value(const Vector& x) const;
};

struct LogregParams {
  int agents = 10;
  int dim = 1000;
  int samples = 400;
  double lambda = 1e-2;
  double label_noise = 0.1;
  std::uint64_t seed = 0;
};

/// Synthetic logistic regression: a_ij ~ N(0, I), x_true ~ N(0, I),
/// y_ij = sign(a_ij^T x_true + eps) with eps ~ N(0, noise^2) and sign(0) = +1.
ProblemInstance gen_logreg(const LogregParams& params);

struct LassoParams {
  int agents = 20;
  int dim = 1000;
  int samples = 200;
  double lambda_c = 1e-1;
  double density = 0.1;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

/// Synthetic LASSO: A_i ~ N(0, 1) entries, sparse x_true,
/// b_i = A_i x_true + eps_i, lambda = lambda_c ||A^T b||_inf.
ProblemInstance gen_lasso(const LassoParams& params);

/// lambda_c * ||A^T b||_inf over the stacked data. Throws when it is zero.
double lasso_lambda(const std::vector<Matrix>& a, const std::vector<Vector>& b,
                    double lambda_c);

/// Builds LASSO or logistic instances from explicit per-agent data.
ProblemInstance make_lasso_problem(std::vector<Matrix> a, std::vector<Vector> b,
                                   double lambda_c, std::uint64_t seed = 0);
ProblemInstance make_logreg_problem(std::vector<Matrix> features,
                                    std::vector<Vector> labels, double lambda,
                                    std::uint64_t seed = 0);

/// Sizes of an even split of `total` items over `parts`, remainder handed out
/// round-robin from the first part.
std::vector<int> split_counts(int total, int parts);

}  // namespace dripalm
