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

#include "dripalm/objectives.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "dripalm/random.hpp"

namespace dripalm {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

struct LogregData {
  Matrix features;
  Vector labels;
  double lambda;
};

struct LeastSquaresData {
  Matrix a;
  Vector b;
};

// Normal draws in a fixed order so generated instances are reproducible.
Matrix normal_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

Vector normal_vector(Rng& rng, int size, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(size);
  for (int k = 0; k < size; ++k) v(k) = normal(rng);
  return v;
}

}  // namespace

LocalObjective::LocalObjective(int dim, SmoothFn smooth,
                               std::optional<NonsmoothTerm> nonsmooth,
                               std::optional<double> lipschitz_hint)
    : dim_(dim),
      smooth_(std::move(smooth)),
      nonsmooth_(std::move(nonsmooth)),
      lipschitz_hint_(lipschitz_hint) {
  if (!smooth_) throw std::invalid_argument("local objective needs a smooth part");
  if (lipschitz_hint_ && !(*lipschitz_hint_ >= 0.0)) {
    throw std::invalid_argument("Lipschitz hint must be nonnegative");
  }
}

double LocalObjective::smooth_value(ConstBlock x) const {
  Vector grad(dim_);
  return smooth_(x, grad);
}

Vector LocalObjective::smooth_gradient(ConstBlock x) const {
  Vector grad(dim_);
  smooth_(x, grad);
  return grad;
}

double LocalObjective::nonsmooth_value(ConstBlock x) const {
  return nonsmooth_ ? nonsmooth_->value(x) : 0.0;
}

void LocalObjective::prox(ConstBlock v, double nu, MutableBlock out) const {
  if (nonsmooth_) {
    nonsmooth_->prox(v, nu, out);
  } else {
    out = v;
  }
}

void soft_threshold(ConstBlock v, double threshold, MutableBlock out) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    double mag = std::abs(v(k)) - threshold;
    out(k) = mag > 0.0 ? std::copysign(mag, v(k)) : 0.0;
  }
}

double spectral_norm_squared(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose())
                                     : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  // Relative slack keeps the value an upper bound despite eigensolver roundoff.
  return eig.eigenvalues().maxCoeff() * (1.0 + 1e-12);
}

LocalObjective logreg_local(Matrix features, Vector labels, double lambda) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("logistic: features and labels disagree in size");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("logistic: lambda must be > 0");
  for (Eigen::Index j = 0; j < labels.size(); ++j) {
    if (labels(j) != 1.0 && labels(j) != -1.0) {
      throw std::invalid_argument("logistic: label " + std::to_string(j) +
                                  " is not in {-1, +1}");
    }
  }
  const int dim = static_cast<int>(features.cols());
  const double lipschitz = 0.25 * spectral_norm_squared(features) + lambda;
  auto data = std::make_shared<LogregData>(
      LogregData{std::move(features), std::move(labels), lambda});
  auto smooth = [data](ConstBlock x, MutableBlock grad) {
    Vector z = data->features * x;
    double value = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double yz = data->labels(j) * z(j);
      value += softplus(-yz);
      z(j) = -data->labels(j) * sigmoid(-yz);
    }
    grad.noalias() = data->features.transpose() * z;
    grad += data->lambda * x;
    return value + 0.5 * data->lambda * x.squaredNorm();
  };
  return LocalObjective(dim, std::move(smooth), std::nullopt, lipschitz);
}

LocalObjective lasso_local(Matrix a, Vector b, double lambda, int agents) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("lasso: A has " + std::to_string(a.rows()) +
                                " rows but b has " + std::to_string(b.size()));
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("lasso: lambda must be > 0");
  if (agents < 1) throw std::invalid_argument("lasso: agent count must be >= 1");
  const int dim = static_cast<int>(a.cols());
  const double lipschitz = spectral_norm_squared(a);
  const double weight = lambda / agents;
  auto data = std::make_shared<LeastSquaresData>(
      LeastSquaresData{std::move(a), std::move(b)});
  auto smooth = [data](ConstBlock x, MutableBlock grad) {
    Vector r = data->a * x - data->b;
    grad.noalias() = data->a.transpose() * r;
    return 0.5 * r.squaredNorm();
  };
  NonsmoothTerm l1{
      [weight](ConstBlock x) { return weight * x.lpNorm<1>(); },
      [weight](ConstBlock v, double nu, MutableBlock out) {
        soft_threshold(v, nu * weight, out);
      }};
  return LocalObjective(dim, std::move(smooth), std::move(l1), lipschitz);
}

LocalObjective quadratic_local(Vector center) {
  const int dim = static_cast<int>(center.size());
  auto c = std::make_shared<const Vector>(std::move(center));
  auto smooth = [c](ConstBlock x, MutableBlock grad) {
    grad = x - *c;
    return 0.5 * grad.squaredNorm();
  };
  return LocalObjective(dim, std::move(smooth), std::nullopt, 1.0);
}

std::string to_string(ProblemFamily family) {
  switch (family) {
    case ProblemFamily::kLogistic:
      return "logreg";
    case ProblemFamily::kLasso:
      return "lasso";
    case ProblemFamily::kCustom:
      return "custom";
  }
  return "custom";
}

ProblemFamily parse_problem_family(const std::string& name) {
  if (name == "logreg" || name == "logistic") return ProblemFamily::kLogistic;
  if (name == "lasso") return ProblemFamily::kLasso;
  if (name == "custom") return ProblemFamily::kCustom;
  throw std::invalid_argument("unknown problem family '" + name +
                              "' (expected logreg or lasso)");
}

bool ProblemInstance::smooth() const {
  return std::none_of(locals.begin(), locals.end(),
                      [](const LocalObjective& f) { return f.has_nonsmooth(); });
}

std::optional<double> ProblemInstance::max_lipschitz() const {
  double best = 0.0;
  for (const auto& f : locals) {
    auto hint = f.lipschitz_hint();
    if (!hint) return std::nullopt;
    best = std::max(best, *hint);
  }
  return best;
}

std::optional<double> ProblemInstance::strong_convexity() const {
  if (meta.family == ProblemFamily::kLogistic && meta.lambda > 0.0) {
    return meta.lambda;
  }
  return std::nullopt;
}

double ProblemInstance::value(const StackedVector& x) const {
  double total = 0.0;
  for (int i = 0; i < agents; ++i) total += locals[i].value(x.block(i));
  return total;
}

double ProblemInstance::centralized_value(const Vector& x) const {
  double total = 0.0;
  for (int i = 0; i < agents; ++i) total += locals[i].value(x);
  return total;
}

std::vector<int> split_counts(int total, int parts) {
  if (parts < 1) throw std::invalid_argument("split needs at least one part");
  std::vector<int> counts(parts, total / parts);
  for (int i = 0; i < total % parts; ++i) ++counts[i];
  return counts;
}

double lasso_lambda(const std::vector<Matrix>& a, const std::vector<Vector>& b,
                    double lambda_c) {
  if (!(lambda_c > 0.0)) throw std::invalid_argument("lambda_c must be > 0");
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument("lasso: need matching per-agent A_i and b_i");
  }
  Vector atb = Vector::Zero(a.front().cols());
  for (std::size_t i = 0; i < a.size(); ++i) atb.noalias() += a[i].transpose() * b[i];
  const double lambda = lambda_c * atb.lpNorm<Eigen::Infinity>();
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("lasso: A^T b = 0 gives a degenerate lambda = 0");
  }
  return lambda;
}

ProblemInstance make_lasso_problem(std::vector<Matrix> a, std::vector<Vector> b,
                                   double lambda_c, std::uint64_t seed) {
  const double lambda = lasso_lambda(a, b, lambda_c);
  ProblemInstance p;
  p.agents = static_cast<int>(a.size());
  p.dim = static_cast<int>(a.front().cols());
  for (int i = 0; i < p.agents; ++i) {
    if (a[i].cols() != p.dim) {
      throw std::invalid_argument("lasso: agent " + std::to_string(i) +
                                  " has a different column count");
    }
    p.locals.push_back(lasso_local(a[i], b[i], lambda, p.agents));
  }
  p.meta.family = ProblemFamily::kLasso;
  p.meta.lambda = lambda;
  p.meta.lambda_c = lambda_c;
  p.meta.seed = seed;
  p.meta.data = std::move(a);
  p.meta.targets = std::move(b);
  return p;
}

ProblemInstance make_logreg_problem(std::vector<Matrix> features,
                                    std::vector<Vector> labels, double lambda,
                                    std::uint64_t seed) {
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("logistic: need matching per-agent data");
  }
  ProblemInstance p;
  p.agents = static_cast<int>(features.size());
  p.dim = static_cast<int>(features.front().cols());
  for (int i = 0; i < p.agents; ++i) {
    if (features[i].cols() != p.dim) {
      throw std::invalid_argument("logistic: agent " + std::to_string(i) +
                                  " has a different feature dimension");
    }
    p.locals.push_back(logreg_local(features[i], labels[i], lambda));
  }
  p.meta.family = ProblemFamily::kLogistic;
  p.meta.lambda = lambda;
  p.meta.seed = seed;
  p.meta.data = std::move(features);
  p.meta.targets = std::move(labels);
  return p;
}

ProblemInstance gen_logreg(const LogregParams& params) {
  if (params.agents < 1 || params.dim < 1 || params.samples < params.agents) {
    throw std::invalid_argument("logistic generator: need agents >= 1, dim >= 1 "
                                "and at least one sample per agent");
  }
  Rng rng(params.seed);
  Vector x_true = normal_vector(rng, params.dim, 1.0);
  Matrix features = normal_matrix(rng, params.samples, params.dim);
  Vector noise = normal_vector(rng, params.samples, params.label_noise);
  Vector scores = features * x_true + noise;
  Vector labels(params.samples);
  for (int j = 0; j < params.samples; ++j) labels(j) = scores(j) >= 0.0 ? 1.0 : -1.0;

  std::vector<Matrix> local_features;
  std::vector<Vector> local_labels;
  int row = 0;
  for (int count : split_counts(params.samples, params.agents)) {
    local_features.emplace_back(features.middleRows(row, count));
    local_labels.emplace_back(labels.segment(row, count));
    row += count;
  }
  ProblemInstance p = make_logreg_problem(std::move(local_features),
                                          std::move(local_labels),
                                          params.lambda, params.seed);
  p.meta.x_true = std::move(x_true);
  return p;
}

ProblemInstance gen_lasso(const LassoParams& params) {
  if (params.agents < 1 || params.dim < 1 || params.samples < params.agents) {
    throw std::invalid_argument("lasso generator: need agents >= 1, dim >= 1 "
                                "and at least one sample per agent");
  }
  if (!(params.density > 0.0 && params.density <= 1.0)) {
    throw std::invalid_argument("lasso generator: density must be in (0, 1]");
  }
  Rng rng(params.seed);
  std::bernoulli_distribution keep(params.density);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x_true = Vector::Zero(params.dim);
  while (x_true.lpNorm<Eigen::Infinity>() == 0.0) {
    for (int k = 0; k < params.dim; ++k) {
      x_true(k) = keep(rng) ? normal(rng) : 0.0;
    }
  }
  std::vector<Matrix> a;
  std::vector<Vector> b;
  for (int count : split_counts(params.samples, params.agents)) {
    Matrix ai = normal_matrix(rng, count, params.dim);
    Vector noise = normal_vector(rng, count, params.noise);
    b.emplace_back(ai * x_true + noise);
    a.emplace_back(std::move(ai));
  }
  ProblemInstance p =
      make_lasso_problem(std::move(a), std::move(b), params.lambda_c, params.seed);
  p.meta.x_true = std::move(x_true);
  return p;
}

}  // namespace dripalm
