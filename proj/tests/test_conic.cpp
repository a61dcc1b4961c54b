// Copyright 2026 the tgcmpc authors
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

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "tgcmpc/conic/program.hpp"
#include "tgcmpc/conic/solve.hpp"

using namespace tgcmpc::conic;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("lp: minimize x subject to x >= 1", "[conic]") {
  Program p;
  const int x = p.add_scalar("x");
  p.minimize(LinExpr::variable(x));
  p.add_le(1.0 - LinExpr::variable(x));  // 1 - x <= 0
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.value(x) == Catch::Approx(1.0).margin(1e-7));
  CHECK(s.objective == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("lp: infeasible and unbounded are classified", "[conic]") {
  {
    Program p;
    const int x = p.add_scalar();
    p.minimize(LinExpr::variable(x));
    p.add_le(LinExpr::variable(x) - (-1.0));  // x <= -1
    p.add_le(1.0 - LinExpr::variable(x));     // x >= 1
    CHECK(solve(p).status == SolveStatus::kInfeasible);
  }
  {
    Program p;
    const int x = p.add_scalar();
    p.minimize(LinExpr::variable(x));
    p.add_le(LinExpr::variable(x) - 1.0);  // x <= 1, min x unbounded below
    CHECK(solve(p).status == SolveStatus::kUnbounded);
  }
}

TEST_CASE("lp: equality elimination", "[conic]") {
  Program p;
  const int x = p.add_scalar("x");
  const int y = p.add_scalar("y");
  p.minimize(LinExpr::variable(x) + LinExpr::variable(y));
  p.add_eq(LinExpr::variable(x) - LinExpr::variable(y) - 2.0);
  p.add_le(-LinExpr::variable(x));
  p.add_le(-LinExpr::variable(y));
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.value(x) == Catch::Approx(2.0).margin(1e-7));
  CHECK(s.value(y) == Catch::Approx(0.0).margin(1e-7));
}

TEST_CASE("soc: Pythagorean norm bound", "[conic]") {
  Program p;
  const int t = p.add_scalar("t");
  p.minimize(LinExpr::variable(t));
  p.add_soc({LinExpr::variable(t), LinExpr(3.0), LinExpr(4.0)});
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.value(t) == Catch::Approx(5.0).margin(1e-7));
}

TEST_CASE("soc: projection onto a shifted point", "[conic]") {
  // minimize || x - (2, -1) || with x in the unit box: optimum at (1, -1)
  Program p;
  const int t = p.add_scalar("t");
  const VecVar x = p.add_vector("x", 2);
  p.minimize(LinExpr::variable(t));
  p.add_soc({LinExpr::variable(t), x[0] - 2.0, x[1] - (-1.0)});
  for (int i = 0; i < 2; ++i) {
    p.add_le(x[i] - 1.0);
    p.add_le(-1.0 - x[i]);
  }
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.value(t) == Catch::Approx(1.0).margin(1e-6));
  CHECK(s.value(x)[0] == Catch::Approx(1.0).margin(1e-6));
  // the x[1] coordinate is degenerate (flat objective), accurate to sqrt(mu)
  CHECK(s.value(x)[1] == Catch::Approx(-1.0).margin(1e-4));
}

TEST_CASE("sdp: minimize trace subject to X >= I", "[conic]") {
  Program p;
  const SymVar X = p.add_symmetric("X", 2);
  LinExpr tr;
  for (int i = 0; i < 2; ++i) tr += LinExpr::variable(X.index(i, i));
  p.minimize(tr);
  p.add_psd(MatExpr::of(X) - MatExpr::identity(2));
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == Catch::Approx(2.0).margin(1e-6));
  const MatrixXd Xv = s.value(X);
  CHECK((Xv - MatrixXd::Identity(2, 2)).norm() < 1e-5);
}

TEST_CASE("sdp: smallest t with t*I >= A equals the top eigenvalue", "[conic]") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);  // 3..6
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = gauss(rng);
    const MatrixXd A = 0.5 * (B + B.transpose());

    Program p;
    const int t = p.add_scalar("t");
    p.minimize(LinExpr::variable(t));
    MatExpr M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        M.at(i, j) = LinExpr(-A(i, j));
        if (i == j) M.at(i, j) += LinExpr::variable(t);
      }
    p.add_psd(M);
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::kOptimal);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A, Eigen::EigenvaluesOnly);
    CHECK(s.value(t) == Catch::Approx(es.eigenvalues().maxCoeff()).margin(1e-6));
  }
}

TEST_CASE("sdp: returned PSD blocks have eigenvalues above -1e-7", "[conic]") {
  Program p;
  const SymVar X = p.add_symmetric("X", 3);
  LinExpr tr;
  for (int i = 0; i < 3; ++i) tr += LinExpr::variable(X.index(i, i));
  p.minimize(tr);
  MatrixXd A(3, 3);
  A << 2, 1, 0, 1, 3, 0.5, 0, 0.5, 1;
  p.add_psd(MatExpr::of(X) - MatExpr::constant(A));
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.value(X) - A, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-7);
  CHECK(s.max_violation <= 1e-6 * (1.0 + s.x.cwiseAbs().maxCoeff()));
}

TEST_CASE("lp: random 2-D instances match a vertex-enumeration oracle", "[conic]") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 6;
    MatrixXd H(m + 4, 2);
    VectorXd g(m + 4);
    for (int r = 0; r < m; ++r) {
      H(r, 0) = uni(rng);
      H(r, 1) = uni(rng);
      g[r] = 1.0 + 0.5 * uni(rng);
    }
    // bounding box keeps the oracle finite
    H.row(m) << 1, 0;
    H.row(m + 1) << -1, 0;
    H.row(m + 2) << 0, 1;
    H.row(m + 3) << 0, -1;
    g.tail(4).setConstant(5.0);
    VectorXd obj(2);
    obj << uni(rng), uni(rng);

    // oracle: evaluate all feasible intersection vertices
    double best = -1e300;
    bool any = false;
    for (int i = 0; i < H.rows(); ++i)
      for (int j = i + 1; j < H.rows(); ++j) {
        Eigen::Matrix2d Hij;
        Hij << H(i, 0), H(i, 1), H(j, 0), H(j, 1);
        if (std::abs(Hij.determinant()) < 1e-9) continue;
        const Eigen::Vector2d v = Hij.inverse() * Eigen::Vector2d(g[i], g[j]);
        if (((H * v - g).array() <= 1e-9).all()) {
          any = true;
          best = std::max(best, obj.dot(v));
        }
      }
    if (!any) continue;

    const LpResult r = lp_maximize(H, g, obj);
    REQUIRE(r.status == SolveStatus::kOptimal);
    CHECK(r.value == Catch::Approx(best).margin(1e-6));
    ++solved;
  }
  CHECK(solved >= 40);  // the generator overwhelmingly produces nonempty sets
}

TEST_CASE("lean profile refuses PSD programs", "[conic]") {
  Program p;
  const SymVar X = p.add_symmetric("X", 2);
  p.minimize(LinExpr::variable(X.index(0, 0)));
  p.add_psd(MatExpr::of(X));
  const DenseIpmBackend lean(Profile::kLean);
  CHECK_THROWS_AS(solve(p, lean), std::runtime_error);
  const DenseIpmBackend full(Profile::kFull);
  CHECK(solve(p, full).status == SolveStatus::kOptimal);
}

TEST_CASE("block builder mirrors star blocks", "[conic]") {
  Program p;
  const SymVar X = p.add_symmetric("X", 2);
  SymBlockBuilder b({2, 2});
  b.set(0, 0, -1.0 * MatExpr::identity(2));
  b.set(0, 1, MatExpr::of(X));
  b.set(1, 1, -1.0 * MatExpr::identity(2));
  const MatExpr M = b.build();
  REQUIRE(M.rows() == 4);
  VectorXd x = VectorXd::Zero(p.num_vars());
  x[X.index(0, 1)] = 0.7;
  // mirrored block: M(3, 0) must equal X(1, 0) = X(0, 1)
  CHECK(M.at(3, 0).eval(x) == Catch::Approx(0.7));
  CHECK(M.at(0, 3).eval(x) == Catch::Approx(0.7));
  CHECK(M.at(0, 0).eval(x) == Catch::Approx(-1.0));
}
