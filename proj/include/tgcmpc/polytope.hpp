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

#ifndef TGCMPC_POLYTOPE_HPP_
#define TGCMPC_POLYTOPE_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tgcmpc/conic/solve.hpp"

namespace tgcmpc {

/// H-representation polytope { x | H x <= g } with rows kept at unit
/// Euclidean norm. Supports the algebra needed by the backward RCI
/// recursion: intersection, affine preimage, Fourier-Motzkin projection,
/// LP-based redundancy removal and containment tests.
class Polytope {
 public:
  static constexpr double kRedundancyTol = 1e-8;
  static constexpr double kEqualityTol = 1e-7;

  Polytope() = default;

  Polytope(const Eigen::MatrixXd& H, const Eigen::VectorXd& g) : dim_(static_cast<int>(H.cols())) {
    if (H.rows() != g.size()) throw std::invalid_argument("polytope: H/g row mismatch");
    std::vector<int> keep;
    for (int r = 0; r < H.rows(); ++r) {
      const double nrm = H.row(r).norm();
      if (nrm < 1e-14) {
        if (g[r] < -1e-12) infeasible_row_ = true;  // 0'x <= negative
        continue;
      }
      keep.push_back(r);
    }
    H_.resize(keep.size(), dim_);
    g_.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      const double nrm = H.row(keep[i]).norm();
      H_.row(static_cast<int>(i)) = H.row(keep[i]) / nrm;
      g_[static_cast<int>(i)] = g[keep[i]] / nrm;
    }
  }

  static Polytope box(int dim, double radius) {
    Eigen::MatrixXd H(2 * dim, dim);
    H.setZero();
    Eigen::VectorXd g = Eigen::VectorXd::Constant(2 * dim, radius);
    for (int i = 0; i < dim; ++i) {
      H(i, i) = 1.0;
      H(dim + i, i) = -1.0;
    }
    return Polytope(H, g);
  }

  int dim() const { return dim_; }
  int num_rows() const { return static_cast<int>(H_.rows()); }
  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& g() const { return g_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    if (infeasible_row_) return false;
    return ((H_ * x - g_).array() <= tol).all();
  }

  /// max d'x over the set; status reports unbounded/infeasible cases.
  conic::LpResult support(const Eigen::VectorXd& d) const {
    if (infeasible_row_) return {conic::SolveStatus::kInfeasible, {}, 0.0};
    return conic::lp_maximize(H_, g_, d);
  }

  bool is_empty() const {
    if (infeasible_row_) return true;
    if (H_.rows() == 0) return false;  // whole space
    // Chebyshev radius: max r s.t. H x + r <= g (rows are unit norm)
    Eigen::MatrixXd Hc(H_.rows(), dim_ + 1);
    Hc.leftCols(dim_) = H_;
    Hc.col(dim_).setOnes();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim_ + 1);
    d[dim_] = 1.0;
    const auto r = conic::lp_maximize(Hc, g_, d);
    if (r.status == conic::SolveStatus::kUnbounded) return false;
    if (r.status == conic::SolveStatus::kInfeasible) return true;
    return r.value < -1e-9;
  }

  /// Chebyshev center (deepest point); radius may be +inf for unbounded sets,
  /// in which case the LP is re-run inside a large box.
  std::pair<Eigen::VectorXd, double> chebyshev_center(double box_radius = 1e6) const {
    Eigen::MatrixXd Hc(H_.rows() + 2 * dim_, dim_ + 1);
    Eigen::VectorXd gc(H_.rows() + 2 * dim_);
    Hc.setZero();
    Hc.topLeftCorner(H_.rows(), dim_) = H_;
    Hc.col(dim_).head(H_.rows()).setOnes();
    gc.head(H_.rows()) = g_;
    for (int i = 0; i < dim_; ++i) {
      Hc(H_.rows() + i, i) = 1.0;
      Hc(H_.rows() + dim_ + i, i) = -1.0;
      gc[H_.rows() + i] = box_radius;
      gc[H_.rows() + dim_ + i] = box_radius;
    }
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim_ + 1);
    d[dim_] = 1.0;
    const auto r = conic::lp_maximize(Hc, gc, d);
    if (!r.x.size()) throw std::runtime_error("polytope: chebyshev center LP failed");
    return {r.x.head(dim_), r.value};
  }

  /// Removes every row whose removal does not change the set (one LP per
  /// row, decided against the currently retained rows).
  Polytope reduce() const {
    if (infeasible_row_ || H_.rows() <= 1) return *this;
    std::vector<bool> keep(H_.rows(), true);
    for (int i = 0; i < H_.rows(); ++i) {
      // assemble retained rows except i, with a cap on row i's direction so
      // the LP cannot be unbounded
      std::vector<int> rows;
      for (int r = 0; r < H_.rows(); ++r)
        if (r != i && keep[r]) rows.push_back(r);
      if (rows.empty()) break;
      Eigen::MatrixXd Hr(rows.size() + 1, dim_);
      Eigen::VectorXd gr(rows.size() + 1);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        Hr.row(static_cast<int>(k)) = H_.row(rows[k]);
        gr[static_cast<int>(k)] = g_[rows[k]];
      }
      Hr.row(static_cast<int>(rows.size())) = H_.row(i);
      gr[static_cast<int>(rows.size())] = g_[i] + 1.0;
      const auto lp = conic::lp_maximize(Hr, gr, H_.row(i).transpose());
      if (lp.status == conic::SolveStatus::kOptimal && lp.value <= g_[i] + kRedundancyTol)
        keep[i] = false;
      // on any solver trouble the row is retained conservatively
    }
    int n = 0;
    for (bool k : keep) n += k;
    Eigen::MatrixXd Hn(n, dim_);
    Eigen::VectorXd gn(n);
    int w = 0;
    for (int r = 0; r < H_.rows(); ++r)
      if (keep[r]) {
        Hn.row(w) = H_.row(r);
        gn[w++] = g_[r];
      }
    Polytope out;
    out.dim_ = dim_;
    out.H_ = std::move(Hn);
    out.g_ = std::move(gn);
    return out;
  }

  friend Polytope intersect(const Polytope& P, const Polytope& Q) {
    if (P.dim_ != Q.dim_) throw std::invalid_argument("polytope: dimension mismatch");
    Eigen::MatrixXd H(P.num_rows() + Q.num_rows(), P.dim_);
    Eigen::VectorXd g(H.rows());
    H << P.H_, Q.H_;
    g << P.g_, Q.g_;
    Polytope out(H, g);
    out.infeasible_row_ = P.infeasible_row_ || Q.infeasible_row_;
    return out.infeasible_row_ ? out : out.reduce();
  }

  /// Preimage of the set under x+ = A x + B u: rows H [A B] over (x, u).
  friend Polytope preimage(const Polytope& P, const Eigen::MatrixXd& A,
                           const Eigen::MatrixXd& B) {
    if (A.rows() != P.dim_ || B.rows() != P.dim_)
      throw std::invalid_argument("polytope: preimage shape mismatch");
    Eigen::MatrixXd H(P.num_rows(), A.cols() + B.cols());
    H.leftCols(A.cols()) = P.H_ * A;
    H.rightCols(B.cols()) = P.H_ * B;
    Polytope out(H, P.g_);
    out.infeasible_row_ = P.infeasible_row_;
    return out;
  }

  /// Cylindrical lift into a larger space: the set constrains coordinates
  /// `coords` of the new space, all others free.
  Polytope lift(int new_dim, const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != dim_)
      throw std::invalid_argument("polytope: lift coordinate count");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(H_.rows(), new_dim);
    for (int j = 0; j < dim_; ++j) H.col(coords[j]) = H_.col(j);
    Polytope out(H, g_);
    out.infeasible_row_ = infeasible_row_;
    return out;
  }

  /// Exact orthogonal projection onto the given (strictly increasing)
  /// coordinate subset, by Fourier-Motzkin elimination of the rest with
  /// redundancy removal after every elimination.
  Polytope project(const std::vector<int>& coords) const {
    if (is_empty()) throw std::runtime_error("polytope: cannot project an empty set");
    for (std::size_t i = 1; i < coords.size(); ++i)
      if (coords[i] <= coords[i - 1])
        throw std::invalid_argument("polytope: projection coordinates must be increasing");
    // permute kept coordinates to the front
    std::vector<int> perm(coords.begin(), coords.end());
    for (int j = 0; j < dim_; ++j)
      if (!std::binary_search(coords.begin(), coords.end(), j)) perm.push_back(j);
    Eigen::MatrixXd Hp(H_.rows(), dim_);
    for (int j = 0; j < dim_; ++j) Hp.col(j) = H_.col(perm[j]);
    Polytope cur(Hp, g_);
    while (cur.dim_ > static_cast<int>(coords.size())) cur = cur.eliminate_last();
    return cur;
  }

  /// True if the set is contained in Q (LP on every row of Q).
  friend bool is_subset(const Polytope& P, const Polytope& Q,
                        double tol = Polytope::kEqualityTol) {
    if (P.dim_ != Q.dim_) throw std::invalid_argument("polytope: dimension mismatch");
    if (P.is_empty()) return true;
    for (int r = 0; r < Q.num_rows(); ++r) {
      const auto lp = P.support(Q.H_.row(r).transpose());
      if (lp.status == conic::SolveStatus::kUnbounded) return false;
      if (lp.status != conic::SolveStatus::kOptimal &&
          lp.status != conic::SolveStatus::kInaccurate)
        return false;
      if (lp.value > Q.g_[r] + tol) return false;
    }
    return true;
  }

  friend bool set_equals(const Polytope& P, const Polytope& Q,
                         double tol = Polytope::kEqualityTol) {
    return is_subset(P, Q, tol) && is_subset(Q, P, tol);
  }

  /// Boundary polyline of a bounded 2-D polytope (closed, counterclockwise).
  /// Empty result means the slice is empty or unbounded.
  std::vector<Eigen::Vector2d> boundary_polyline_2d() const {
    if (dim_ != 2) throw std::invalid_argument("polytope: polyline needs dimension 2");
    if (is_empty()) return {};
    const Polytope r = reduce();
    std::vector<int> order(r.num_rows());
    for (int i = 0; i < r.num_rows(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::atan2(r.H_(a, 1), r.H_(a, 0)) < std::atan2(r.H_(b, 1), r.H_(b, 0));
    });
    std::vector<Eigen::Vector2d> verts;
    const int n = r.num_rows();
    if (n < 3) return {};  // unbounded
    for (int k = 0; k < n; ++k) {
      const int i = order[k], j = order[(k + 1) % n];
      Eigen::Matrix2d A;
      A << r.H_(i, 0), r.H_(i, 1), r.H_(j, 0), r.H_(j, 1);
      if (std::abs(A.determinant()) < 1e-12) return {};  // parallel facets: unbounded
      Eigen::Vector2d v = A.inverse() * Eigen::Vector2d(r.g_[i], r.g_[j]);
      if (!r.contains(v, 1e-6)) return {};
      verts.push_back(v);
    }
    return verts;
  }

 private:
  Polytope eliminate_last() const {
    const int c = dim_ - 1;
    std::vector<int> pos, neg, zer;
    for (int r = 0; r < H_.rows(); ++r) {
      const double v = H_(r, c);
      if (v > 1e-12)
        pos.push_back(r);
      else if (v < -1e-12)
        neg.push_back(r);
      else
        zer.push_back(r);
    }
    const int n_new = static_cast<int>(zer.size() + pos.size() * neg.size());
    Eigen::MatrixXd Hn(n_new, c);
    Eigen::VectorXd gn(n_new);
    int w = 0;
    for (int r : zer) {
      Hn.row(w) = H_.row(r).head(c);
      gn[w++] = g_[r];
    }
    for (int i : pos)
      for (int j : neg) {
        const double wi = 1.0 / H_(i, c), wj = -1.0 / H_(j, c);
        Hn.row(w) = wi * H_.row(i).head(c) + wj * H_.row(j).head(c);
        gn[w++] = wi * g_[i] + wj * g_[j];
      }
    return Polytope(Hn, gn).reduce();
  }

  Eigen::MatrixXd H_{0, 0};
  Eigen::VectorXd g_;
  int dim_ = 0;
  bool infeasible_row_ = false;
};

}  // namespace tgcmpc

#endif  // TGCMPC_POLYTOPE_HPP_
