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

#include "tgcmpc/polytope.hpp"
#include "test_util.hpp"

using tgcmpc::Polytope;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("construction normalizes rows and drops zero rows", "[polytope]") {
  MatrixXd H(3, 2);
  H << 2, 0, 0, 0, 0, -4;
  VectorXd g(3);
  g << 4, 1, 8;
  const Polytope P(H, g);
  CHECK(P.num_rows() == 2);
  CHECK(P.H().row(0).norm() == Catch::Approx(1.0));
  CHECK(P.g()[0] == Catch::Approx(2.0));  // x <= 2
  CHECK(P.g()[1] == Catch::Approx(2.0));  // -y <= 2
}

TEST_CASE("zero row with negative offset marks the set empty", "[polytope]") {
  MatrixXd H(1, 2);
  H.setZero();
  VectorXd g(1);
  g << -1.0;
  CHECK(Polytope(H, g).is_empty());
}

TEST_CASE("intersect: idempotence and box cut", "[polytope]") {
  std::mt19937_64 rng(3);
  const Polytope P = test_util::random_polytope(3, 4, rng);
  CHECK(set_equals(intersect(P, P), P));

  const Polytope box = Polytope::box(2, 1.0);
  MatrixXd Hh(1, 2);
  Hh << 1, 0;
  VectorXd gh(1);
  gh << 0.0;
  const Polytope cut = intersect(box, Polytope(Hh, gh));
  MatrixXd He(4, 2);
  He << 1, 0, -1, 0, 0, 1, 0, -1;
  VectorXd ge(4);
  ge << 0, 1, 1, 1;
  CHECK(set_equals(cut, Polytope(He, ge)));
}

TEST_CASE("intersect: membership matches pointwise conjunction", "[polytope]") {
  std::mt19937_64 rng(17);
  const Polytope P = test_util::random_polytope(3, 5, rng);
  const Polytope Q = test_util::random_polytope(3, 5, rng);
  const Polytope I = intersect(P, Q);
  std::uniform_real_distribution<double> uni(-2.5, 2.5);
  for (int k = 0; k < 1000; ++k) {
    VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = uni(rng);
    const bool in_both = P.contains(x, 1e-9) && Q.contains(x, 1e-9);
    // skip points within tolerance of either boundary
    const double margin_p = ((P.H() * x - P.g()).array()).maxCoeff();
    const double margin_q = ((Q.H() * x - Q.g()).array()).maxCoeff();
    if (std::abs(margin_p) < 1e-7 || std::abs(margin_q) < 1e-7) continue;
    CHECK(I.contains(x, 1e-7) == in_both);
  }
}

TEST_CASE("preimage: identity map and scalar example", "[polytope]") {
  std::mt19937_64 rng(5);
  const Polytope P = test_util::random_polytope(2, 3, rng);
  const Polytope pre = preimage(P, MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 1));
  REQUIRE(pre.dim() == 3);
  for (int k = 0; k < 200; ++k) {
    VectorXd xu(3);
    xu.head(2) = test_util::sample_inside(P, rng);
    xu[2] = 100.0 * (k - 100);  // u free
    CHECK(pre.contains(xu, 1e-7));
  }

  MatrixXd H1(1, 1);
  H1 << 1;
  VectorXd g1(1);
  g1 << 1;
  MatrixXd A(1, 1), B(1, 1);
  A << 2;
  B << 1;
  const Polytope pre1 = preimage(Polytope(H1, g1), A, B);
  VectorXd p(2);
  p << 0.4, 0.1;  // 2x + u = 0.9 <= 1
  CHECK(pre1.contains(p));
  p << 0.4, 0.3;  // 1.1 > 1
  CHECK(!pre1.contains(p));
}

TEST_CASE("preimage: forward map lands inside the target", "[polytope]") {
  std::mt19937_64 rng(11);
  const Polytope P = test_util::random_polytope(3, 4, rng);
  MatrixXd A(3, 3), B(3, 2);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) A(i, j) = 0.5 * gauss(rng);
    for (int j = 0; j < 2; ++j) B(i, j) = 0.5 * gauss(rng);
  }
  const Polytope pre = preimage(P, A, B);
  for (int k = 0; k < 1000; ++k) {
    const VectorXd xu = test_util::sample_inside(pre, rng);
    if (!xu.size()) continue;
    CHECK(P.contains(A * xu.head(3) + B * xu.tail(2), 1e-6));
  }
}

TEST_CASE("project: cylindrical set and hand triangle", "[polytope]") {
  // cylinder: constraints touch only x coordinates
  MatrixXd H(2, 3);
  H << 1, 0, 0, -1, 1, 0;
  VectorXd g(2);
  g << 1, 2;
  const Polytope cyl(H, g);
  const Polytope proj = cyl.project({0, 1});
  CHECK(set_equals(proj, Polytope(H.leftCols(2), g)));

  // {x + u <= 1, u >= 0, x >= 0} projected to x -> [0, 1]
  MatrixXd Ht(3, 2);
  Ht << 1, 1, 0, -1, -1, 0;
  VectorXd gt(3);
  gt << 1, 0, 0;
  const Polytope tri(Ht, gt);
  MatrixXd He(2, 1);
  He << 1, -1;
  VectorXd ge(2);
  ge << 1, 0;
  CHECK(set_equals(tri.project({0}), Polytope(He, ge)));
}

TEST_CASE("project: LP feasibility oracle on 4+1 dimensions", "[polytope]") {
  std::mt19937_64 rng(23);
  const Polytope P = test_util::random_polytope(5, 6, rng);
  const Polytope proj = P.project({0, 1, 2, 3});

  // exact 1-D oracle: x in projection iff the u-interval is nonempty
  auto exists_u = [&](const VectorXd& x) {
    double lo = -1e300, hi = 1e300;
    for (int r = 0; r < P.num_rows(); ++r) {
      const double hu = P.H()(r, 4);
      const double rest = P.H().row(r).head(4).dot(x);
      if (std::abs(hu) < 1e-12) {
        if (rest > P.g()[r] + 1e-9) return false;
      } else if (hu > 0.0) {
        hi = std::min(hi, (P.g()[r] - rest) / hu);
      } else {
        lo = std::max(lo, (P.g()[r] - rest) / hu);
      }
    }
    return lo <= hi + 1e-9;
  };

  int checked = 0;
  for (int k = 0; k < 500; ++k) {
    VectorXd x(4);
    if (k % 2 == 0) {
      x = test_util::sample_inside(proj, rng);
    } else {
      const VectorXd b = test_util::sample_boundary(proj, rng);
      x = b * (k % 4 == 1 ? 1.02 : 0.98);
    }
    const double margin = ((proj.H() * x - proj.g()).array()).maxCoeff();
    if (std::abs(margin) < 1e-6) continue;  // too close to call either way
    CHECK(proj.contains(x, 1e-7) == exists_u(x));
    ++checked;
  }
  CHECK(checked > 400);
}

TEST_CASE("project on empty set throws", "[polytope]") {
  MatrixXd H(2, 2);
  H << 1, 0, -1, 0;
  VectorXd g(2);
  g << -1, -1;  // x <= -1 and x >= 1
  CHECK_THROWS_AS(Polytope(H, g).project({0}), std::runtime_error);
}

TEST_CASE("reduce: duplicates and dominated rows", "[polytope]") {
  MatrixXd H(3, 1);
  H << 1, 1, 1;
  VectorXd g(3);
  g << 1, 1, 2;
  const Polytope r = Polytope(H, g).reduce();
  CHECK(r.num_rows() == 1);
  CHECK(r.g()[0] == Catch::Approx(1.0));
}

TEST_CASE("reduce: membership is preserved on dense samples", "[polytope]") {
  std::mt19937_64 rng(31);
  const Polytope P = test_util::random_polytope(3, 12, rng);
  const Polytope R = P.reduce();
  CHECK(R.num_rows() <= P.num_rows());
  std::uniform_real_distribution<double> uni(-2.5, 2.5);
  for (int k = 0; k < 10000; ++k) {
    VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = uni(rng);
    const double margin = ((P.H() * x - P.g()).array()).maxCoeff();
    if (std::abs(margin) < 1e-7) continue;
    CHECK(P.contains(x, 1e-8) == R.contains(x, 1e-8));
  }
}

TEST_CASE("subset and equality checks", "[polytope]") {
  const Polytope box = Polytope::box(2, 1.0);
  const Polytope big = Polytope::box(2, 2.0);
  CHECK(set_equals(box, box));
  CHECK(is_subset(box, big));
  CHECK(!is_subset(big, box));

  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    const Polytope P = test_util::random_polytope(3, 4, rng);
    const Polytope Q = test_util::random_polytope(3, 4, rng);
    const bool sub = is_subset(P, Q);
    // sampling oracle: points of P must lie in Q when sub holds; otherwise
    // some support point of P escapes Q
    bool all_in = true;
    for (int k = 0; k < 200; ++k) {
      const VectorXd x = test_util::sample_inside(P, rng);
      if (!Q.contains(x, 1e-6)) all_in = false;
    }
    if (sub) CHECK(all_in);
    if (!sub) {
      bool escaped = false;
      for (int k = 0; k < 64 && !escaped; ++k) {
        const VectorXd x = test_util::sample_boundary(P, rng);
        if (!Q.contains(x, 1e-7)) escaped = true;
      }
      CHECK(escaped);
    }
  }
}

TEST_CASE("project then preimage with identity is the identity", "[polytope]") {
  std::mt19937_64 rng(53);
  const Polytope P = test_util::random_polytope(3, 5, rng).reduce();
  const Polytope round =
      preimage(P, MatrixXd::Identity(3, 3), MatrixXd::Zero(3, 1)).project({0, 1, 2});
  CHECK(set_equals(round, P));
}

TEST_CASE("Fourier-Motzkin is independent of elimination order", "[polytope]") {
  std::mt19937_64 rng(67);
  const Polytope P = test_util::random_polytope(4, 6, rng);
  const Polytope a = P.project({0, 1});
  // relabel the two eliminated coordinates to swap their elimination order
  MatrixXd Hs = P.H();
  Hs.col(2).swap(Hs.col(3));
  const Polytope b = Polytope(Hs, P.g()).project({0, 1});
  CHECK(set_equals(a, b));
}

TEST_CASE("2-D boundary polyline of the unit box", "[polytope]") {
  const auto poly = Polytope::box(2, 1.0).boundary_polyline_2d();
  REQUIRE(poly.size() == 4);
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area += 0.5 * (p.x() * q.y() - q.x() * p.y());
  }
  CHECK(std::abs(area) == Catch::Approx(4.0));
}
