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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "dripalm/objectives.hpp"
#include "dripalm/problem_io.hpp"
#include "oracles.hpp"

namespace dripalm {
namespace {

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

TEST(Logistic, ValueAndGradientAtOrigin) {
  Matrix a(1, 3);
  a << 1.0, -2.0, 0.5;
  for (double y : {1.0, -1.0}) {
    Vector labels(1);
    labels << y;
    LocalObjective f = logreg_local(a, labels, 0.3);
    Vector g(3);
    const double v = f.smooth(Vector::Zero(3), g);
    EXPECT_NEAR(v, std::log(2.0), 1e-15);
    EXPECT_LE((g - (-y / 2.0) * a.row(0).transpose()).norm(), 1e-15);
  }
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = oracle::random_matrix(8, 6, rng);
    Vector y = oracle::random_vector(8, rng).unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    LocalObjective f = logreg_local(a, y, 1e-2);
    Vector x = oracle::random_vector(6, rng, 0.5);
    Vector fd = oracle::numeric_gradient([&](const Vector& u) { return f.smooth_value(u); }, x);
    EXPECT_LE(relative_error(f.smooth_gradient(x), fd), 1e-6);
  }
}

TEST(Logistic, ConvexAlongSegments) {
  Rng rng(2);
  Matrix a = oracle::random_matrix(10, 4, rng);
  Vector y = Vector::Ones(10);
  y.head(5).setConstant(-1.0);
  LocalObjective f = logreg_local(a, y, 1e-2);
  for (int trial = 0; trial < 100; ++trial) {
    Vector u = oracle::random_vector(4, rng, 3.0);
    Vector v = oracle::random_vector(4, rng, 3.0);
    EXPECT_LE(f.value(0.5 * (u + v)), 0.5 * (f.value(u) + f.value(v)) + 1e-12);
  }
}

TEST(Logistic, StableForLargeMargins) {
  Matrix a(2, 1);
  a << 1.0, -1.0;
  Vector y(2);
  y << 1.0, 1.0;
  LocalObjective f = logreg_local(a, y, 1e-2);
  Vector x(1);
  x << 800.0;
  Vector g(1);
  const double v = f.smooth(x, g);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(std::isfinite(g(0)));
  EXPECT_NEAR(v, 800.0 + 0.5 * 1e-2 * 800.0 * 800.0, 1e-9);
}

TEST(Logistic, RejectsBadLabels) {
  Vector y(2);
  y << 1.0, 0.0;
  EXPECT_THROW(logreg_local(Matrix::Ones(2, 2), y, 1e-2), std::invalid_argument);
}

TEST(Lasso, ProxIsSoftThreshold) {
  // lambda / n = 1 and nu = 1 give an effective threshold of 1.
  LocalObjective f = lasso_local(Matrix::Ones(1, 3), Vector::Ones(1), 4.0, 4);
  Vector v(3);
  v << 2.0, -0.5, 0.0;
  Vector out(3);
  f.prox(v, 1.0, out);
  EXPECT_EQ(out, Vector::Unit(3, 0));
}

TEST(Lasso, GradientMatchesNaiveProduct) {
  Rng rng(3);
  Matrix a = oracle::random_matrix(5, 7, rng);
  Vector b = oracle::random_vector(5, rng);
  Vector x = oracle::random_vector(7, rng);
  LocalObjective f = lasso_local(a, b, 0.4, 2);
  Vector expected = Vector::Zero(7);
  for (int c = 0; c < 7; ++c) {
    for (int r = 0; r < 5; ++r) {
      double ax = 0.0;
      for (int k = 0; k < 7; ++k) ax += a(r, k) * x(k);
      expected(c) += a(r, c) * (ax - b(r));
    }
  }
  EXPECT_LE((f.smooth_gradient(x) - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
  Vector fd = oracle::numeric_gradient([&](const Vector& u) { return f.smooth_value(u); }, x);
  EXPECT_LE(relative_error(f.smooth_gradient(x), fd), 1e-6);
  EXPECT_NEAR(f.nonsmooth_value(x), 0.2 * x.lpNorm<1>(), 1e-14);
}

TEST(Lasso, GradientVanishesAtLeastSquaresSolution) {
  Rng rng(4);
  Matrix a = oracle::random_matrix(4, 4, rng);
  Vector b = oracle::random_vector(4, rng);
  LocalObjective f = lasso_local(a, b, 1e-3, 1);
  Vector x = a.fullPivLu().solve(b);
  EXPECT_LE(f.smooth_gradient(x).norm(), 1e-10);
}

TEST(Lasso, LambdaFromStackedData) {
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  Vector b(2);
  b << 1.0, 1.0;
  EXPECT_DOUBLE_EQ(lasso_lambda({a}, {b}, 0.1), 0.2);
  EXPECT_DOUBLE_EQ(lasso_lambda({a.topRows(1), a.bottomRows(1)},
                                {b.head(1), b.tail(1)}, 0.1),
                   0.2);
  EXPECT_THROW(lasso_lambda({a}, {Vector::Zero(2)}, 0.1), std::invalid_argument);
}

TEST(SoftThreshold, CoordinateOptimality) {
  Rng rng(5);
  std::uniform_real_distribution<double> unit(0.01, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector v = oracle::random_vector(5, rng, 2.0);
    const double t = unit(rng);
    Vector p(5);
    soft_threshold(v, t, p);
    // (v - p) / t must be a subgradient of ||.||_1 at p.
    for (int k = 0; k < 5; ++k) {
      const double s = (v(k) - p(k)) / t;
      if (p(k) > 0.0) {
        EXPECT_NEAR(s, 1.0, 1e-12);
      } else if (p(k) < 0.0) {
        EXPECT_NEAR(s, -1.0, 1e-12);
      } else {
        EXPECT_LE(std::abs(s), 1.0 + 1e-12);
      }
    }
  }
}

TEST(LipschitzHint, BoundsGradientDifferences) {
  Rng rng(6);
  Matrix a = oracle::random_matrix(12, 5, rng);
  Vector y = Vector::Ones(12);
  y.tail(6).setConstant(-1.0);
  for (const LocalObjective& f :
       {logreg_local(a, y, 1e-2), lasso_local(a, oracle::random_vector(12, rng), 0.5, 3)}) {
    const double l = *f.lipschitz_hint();
    for (int trial = 0; trial < 200; ++trial) {
      Vector u = oracle::random_vector(5, rng, 2.0);
      Vector v = oracle::random_vector(5, rng, 2.0);
      EXPECT_LE((f.smooth_gradient(u) - f.smooth_gradient(v)).norm(), (l + 1e-8) * (u - v).norm());
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  EXPECT_NEAR(spectral_norm_squared(a), eig.eigenvalues().maxCoeff(), 1e-10);
  EXPECT_NEAR(*logreg_local(a, y, 1e-2).lipschitz_hint(),
              0.25 * eig.eigenvalues().maxCoeff() + 1e-2, 1e-10);
}

TEST(Generators, LogregDefaults) {
  LogregParams params;
  params.seed = 3;
  params.dim = 50;
  ProblemInstance p = gen_logreg(params);
  EXPECT_EQ(p.agents, 10);
  EXPECT_EQ(p.dim, 50);
  EXPECT_EQ(p.meta.lambda, 1e-2);
  for (int i = 0; i < p.agents; ++i) {
    EXPECT_EQ(p.meta.data[i].rows(), 40);
    for (Eigen::Index j = 0; j < p.meta.targets[i].size(); ++j) {
      EXPECT_TRUE(p.meta.targets[i](j) == 1.0 || p.meta.targets[i](j) == -1.0);
    }
  }
  EXPECT_TRUE(p.smooth());
  EXPECT_EQ(*p.strong_convexity(), 1e-2);
}

TEST(Generators, LassoDefaults) {
  LassoParams params;
  params.seed = 4;
  ProblemInstance p = gen_lasso(params);
  EXPECT_EQ(p.agents, 20);
  EXPECT_EQ(p.dim, 1000);
  for (int i = 0; i < p.agents; ++i) EXPECT_EQ(p.meta.data[i].rows(), 10);
  const long nonzeros = (p.meta.x_true.array() != 0.0).count();
  EXPECT_GT(nonzeros, 60);
  EXPECT_LT(nonzeros, 140);
  EXPECT_DOUBLE_EQ(p.meta.lambda,
                   lasso_lambda(p.meta.data, p.meta.targets, params.lambda_c));
  EXPECT_FALSE(p.smooth());
}

TEST(Generators, DeterministicInSeed) {
  LassoParams lp;
  lp.dim = 40;
  lp.seed = 9;
  EXPECT_EQ(gen_lasso(lp).meta.data[3], gen_lasso(lp).meta.data[3]);
  LogregParams gp;
  gp.dim = 40;
  gp.seed = 9;
  EXPECT_EQ(gen_logreg(gp).meta.targets[2], gen_logreg(gp).meta.targets[2]);
  gp.seed = 10;
  EXPECT_NE(gen_logreg(gp).meta.data[0], gen_logreg(LogregParams{10, 40, 400, 1e-2, 0.1, 9}).meta.data[0]);
}

TEST(Generators, UnevenSplit) {
  EXPECT_EQ(split_counts(11, 3), (std::vector<int>{4, 4, 3}));
  EXPECT_EQ(split_counts(9, 3), (std::vector<int>{3, 3, 3}));
}

TEST(ProblemIo, MatrixBinaryRoundTrip) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  std::stringstream s;
  write_matrix_binary(s, m);
  EXPECT_EQ(s.str().substr(0, 8), "DRMAT001");
  EXPECT_EQ(s.str().size(), 8u + 16u + 6u * 8u);
  EXPECT_EQ(read_matrix_binary(s), m);
}

TEST(ProblemIo, DirectoryRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "dripalm_problem_io_test";
  std::filesystem::remove_all(dir);
  LassoParams params;
  params.dim = 30;
  params.agents = 4;
  params.samples = 12;
  params.seed = 21;
  ProblemInstance p = gen_lasso(params);
  save_problem(p, dir);
  ProblemInstance q = load_problem(dir);
  EXPECT_EQ(q.agents, p.agents);
  EXPECT_EQ(q.dim, p.dim);
  EXPECT_EQ(q.meta.lambda, p.meta.lambda);
  EXPECT_EQ(q.meta.x_true, p.meta.x_true);
  Rng rng(1);
  Vector x = oracle::random_vector(30, rng);
  for (int i = 0; i < p.agents; ++i) EXPECT_EQ(q.locals[i].value(x), p.locals[i].value(x));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace dripalm
