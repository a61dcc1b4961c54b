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

#ifndef TGCMPC_CONIC_IPM_HPP_
#define TGCMPC_CONIC_IPM_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tgcmpc/conic/program.hpp"

namespace tgcmpc::conic {

/// Cone layout of the slack vector: nonnegative rows first, then
/// second-order cone blocks, then PSD blocks in svec packing.
struct ConeLayout {
  int nonneg = 0;
  std::vector<int> socs;
  std::vector<int> psds;

  int rows() const {
    int m = nonneg;
    for (int d : socs) m += d;
    for (int d : psds) m += svec_len(d);
    return m;
  }
  double degree() const {
    double nu = nonneg + static_cast<double>(socs.size());
    for (int d : psds) nu += d;
    return nu;
  }
};

/// min c'x  s.t.  G x + s = h,  s in K.
struct StandardForm {
  Eigen::VectorXd c;
  double c0 = 0.0;
  std::vector<std::vector<std::pair<int, double>>> G;  // sparse rows
  Eigen::VectorXd h;
  ConeLayout cones;

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(h.size()); }
};

struct IpmOptions {
  int max_iters = 200;
  double tol = 1e-8;
  double tol_inaccurate = 1e-6;
  double step_fraction = 0.99;
  bool verbose = false;
};

struct IpmResult {
  SolveStatus status = SolveStatus::kError;
  Eigen::VectorXd x, s, z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nesterov-Todd scalings and Jordan-algebra operations for the product
/// cone, acting on full slack-space vectors.
class ConeOps {
 public:
  explicit ConeOps(const ConeLayout& layout) : lay_(layout) {
    int off = layout.nonneg;
    for (int d : layout.socs) {
      soc_off_.push_back(off);
      off += d;
    }
    for (int d : layout.psds) {
      psd_off_.push_back(off);
      off += svec_len(d);
    }
    m_ = off;
    soc_scale_.resize(layout.socs.size());
    psd_scale_.resize(layout.psds.size());
    lambda_.resize(m_);
    w_nonneg_.resize(layout.nonneg);
  }

  int rows() const { return m_; }

  void identity(Eigen::VectorXd& e) const {
    e.setZero(m_);
    e.head(lay_.nonneg).setOnes();
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) e[soc_off_[k]] = 1.0;
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      Eigen::VectorXd sv;
      svec(Eigen::MatrixXd::Identity(lay_.psds[k], lay_.psds[k]), sv);
      e.segment(psd_off_[k], sv.size()) = sv;
    }
  }

  /// True if the point is in the cone interior (with margin eps).
  bool in_interior(const Eigen::VectorXd& u, double eps = 0.0) const {
    for (int i = 0; i < lay_.nonneg; ++i)
      if (!(u[i] > eps)) return false;
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const auto blk = u.segment(soc_off_[k], lay_.socs[k]);
      if (!(blk[0] - blk.tail(blk.size() - 1).norm() > eps)) return false;
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      Eigen::MatrixXd M;
      smat(u.segment(psd_off_[k], svec_len(lay_.psds[k])), lay_.psds[k], M);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      if (!(es.eigenvalues().minCoeff() > eps)) return false;
    }
    return true;
  }

  bool compute_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    for (int i = 0; i < lay_.nonneg; ++i) {
      if (!(s[i] > 0.0 && z[i] > 0.0)) return false;
      w_nonneg_[i] = std::sqrt(s[i] / z[i]);
      lambda_[i] = std::sqrt(s[i] * z[i]);
    }
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int d = lay_.socs[k];
      const auto sb = s.segment(soc_off_[k], d);
      const auto zb = z.segment(soc_off_[k], d);
      const double js = sb[0] * sb[0] - sb.tail(d - 1).squaredNorm();
      const double jz = zb[0] * zb[0] - zb.tail(d - 1).squaredNorm();
      if (!(js > 0.0 && jz > 0.0 && sb[0] > 0.0 && zb[0] > 0.0)) return false;
      const double rs = std::sqrt(js), rz = std::sqrt(jz);
      Eigen::VectorXd sbar = sb / rs, zbar = zb / rz;
      const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      Eigen::VectorXd wbar(d);
      wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
      wbar.tail(d - 1) = (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
      soc_scale_[k].eta = std::sqrt(rs / rz);
      soc_scale_[k].wbar = wbar;
      // lambda = W z
      Eigen::VectorXd lam(d);
      soc_apply(k, zb, lam, /*inverse=*/false);
      lambda_.segment(soc_off_[k], d) = lam;
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int d = lay_.psds[k];
      Eigen::MatrixXd S, Z;
      smat(s.segment(psd_off_[k], svec_len(d)), d, S);
      smat(z.segment(psd_off_[k], svec_len(d)), d, Z);
      Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      Eigen::MatrixXd Ls = ls.matrixL();
      Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd sig = svd.singularValues();
      if (!(sig.minCoeff() > 0.0)) return false;
      Eigen::VectorXd sig_isqrt = sig.array().sqrt().inverse();
      psd_scale_[k].R = Ls * svd.matrixV() * sig_isqrt.asDiagonal();
      psd_scale_[k].Rinv = sig_isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
      psd_scale_[k].sigma = sig;
      Eigen::VectorXd sv;
      svec(Eigen::MatrixXd(sig.asDiagonal()), sv);
      lambda_.segment(psd_off_[k], sv.size()) = sv;
    }
    return true;
  }

  const Eigen::VectorXd& lambda() const { return lambda_; }

  enum class Op { kW, kWt, kWinv, kWinvT };

  void apply(Op op, const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
    out.resize(m_);
    for (int i = 0; i < lay_.nonneg; ++i) {
      const double w = w_nonneg_[i];
      out[i] = (op == Op::kW || op == Op::kWt) ? w * u[i] : u[i] / w;
    }
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int d = lay_.socs[k];
      Eigen::VectorXd r(d);
      soc_apply(k, u.segment(soc_off_[k], d), r, op == Op::kWinv || op == Op::kWinvT);
      out.segment(soc_off_[k], d) = r;
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int d = lay_.psds[k];
      Eigen::MatrixXd U;
      smat(u.segment(psd_off_[k], svec_len(d)), d, U);
      const auto& R = psd_scale_[k].R;
      const auto& Ri = psd_scale_[k].Rinv;
      Eigen::MatrixXd res;
      switch (op) {
        case Op::kW: res = R.transpose() * U * R; break;
        case Op::kWt: res = R * U * R.transpose(); break;
        case Op::kWinv: res = Ri.transpose() * U * Ri; break;
        case Op::kWinvT: res = Ri * U * Ri.transpose(); break;
      }
      Eigen::VectorXd sv;
      svec(res, sv);
      out.segment(psd_off_[k], sv.size()) = sv;
    }
  }

  /// Jordan product a o b of the product-cone algebra.
  void jprod(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& out) const {
    out.resize(m_);
    for (int i = 0; i < lay_.nonneg; ++i) out[i] = a[i] * b[i];
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int d = lay_.socs[k];
      const auto ab = a.segment(soc_off_[k], d);
      const auto bb = b.segment(soc_off_[k], d);
      out[soc_off_[k]] = ab.dot(bb);
      out.segment(soc_off_[k] + 1, d - 1) =
          ab[0] * bb.tail(d - 1) + bb[0] * ab.tail(d - 1);
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int d = lay_.psds[k];
      Eigen::MatrixXd A, B;
      smat(a.segment(psd_off_[k], svec_len(d)), d, A);
      smat(b.segment(psd_off_[k], svec_len(d)), d, B);
      Eigen::MatrixXd P = 0.5 * (A * B + B * A);
      Eigen::VectorXd sv;
      svec(P, sv);
      out.segment(psd_off_[k], sv.size()) = sv;
    }
  }

  /// Solves lambda o x = d.
  void jdiv_lambda(const Eigen::VectorXd& d, Eigen::VectorXd& out) const {
    out.resize(m_);
    for (int i = 0; i < lay_.nonneg; ++i) out[i] = d[i] / lambda_[i];
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int dd = lay_.socs[k];
      const auto lb = lambda_.segment(soc_off_[k], dd);
      const auto db = d.segment(soc_off_[k], dd);
      const double det = lb[0] * lb[0] - lb.tail(dd - 1).squaredNorm();
      const double x0 = (lb[0] * db[0] - lb.tail(dd - 1).dot(db.tail(dd - 1))) / det;
      out[soc_off_[k]] = x0;
      out.segment(soc_off_[k] + 1, dd - 1) = (db.tail(dd - 1) - x0 * lb.tail(dd - 1)) / lb[0];
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int dd = lay_.psds[k];
      const auto& sig = psd_scale_[k].sigma;
      Eigen::MatrixXd D;
      smat(d.segment(psd_off_[k], svec_len(dd)), dd, D);
      Eigen::MatrixXd X(dd, dd);
      for (int i = 0; i < dd; ++i)
        for (int j = 0; j < dd; ++j) X(i, j) = 2.0 * D(i, j) / (sig[i] + sig[j]);
      Eigen::VectorXd sv;
      svec(X, sv);
      out.segment(psd_off_[k], sv.size()) = sv;
    }
  }

  /// Largest t with lambda + t*u in the cone (possibly +inf).
  double max_step_from_lambda(const Eigen::VectorXd& u) const {
    double t = kInf;
    for (int i = 0; i < lay_.nonneg; ++i)
      if (u[i] < 0.0) t = std::min(t, -lambda_[i] / u[i]);
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int d = lay_.socs[k];
      const auto lb = lambda_.segment(soc_off_[k], d);
      const auto ub = u.segment(soc_off_[k], d);
      // roots of ||l1 + t u1||^2 = (l0 + t u0)^2
      const double a = ub.tail(d - 1).squaredNorm() - ub[0] * ub[0];
      const double b = 2.0 * (lb.tail(d - 1).dot(ub.tail(d - 1)) - lb[0] * ub[0]);
      const double c = lb.tail(d - 1).squaredNorm() - lb[0] * lb[0];  // <= 0 inside
      t = std::min(t, smallest_positive_root(a, b, c));
      if (ub[0] < 0.0) t = std::min(t, -lb[0] / ub[0]);
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int d = lay_.psds[k];
      const auto& sig = psd_scale_[k].sigma;
      Eigen::MatrixXd U;
      smat(u.segment(psd_off_[k], svec_len(d)), d, U);
      Eigen::VectorXd isq = sig.array().sqrt().inverse();
      Eigen::MatrixXd Us = isq.asDiagonal() * U * isq.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Us, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      if (lo < 0.0) t = std::min(t, -1.0 / lo);
    }
    return t;
  }

  /// Largest t with e + t*u in the cone, for arbitrary interior base point p.
  double max_step_from(const Eigen::VectorXd& p, const Eigen::VectorXd& u) const {
    double t = kInf;
    for (int i = 0; i < lay_.nonneg; ++i)
      if (u[i] < 0.0) t = std::min(t, -p[i] / u[i]);
    for (std::size_t k = 0; k < lay_.socs.size(); ++k) {
      const int d = lay_.socs[k];
      const auto pb = p.segment(soc_off_[k], d);
      const auto ub = u.segment(soc_off_[k], d);
      const double a = ub.tail(d - 1).squaredNorm() - ub[0] * ub[0];
      const double b = 2.0 * (pb.tail(d - 1).dot(ub.tail(d - 1)) - pb[0] * ub[0]);
      const double c = pb.tail(d - 1).squaredNorm() - pb[0] * pb[0];
      t = std::min(t, smallest_positive_root(a, b, c));
      if (ub[0] < 0.0) t = std::min(t, -pb[0] / ub[0]);
    }
    for (std::size_t k = 0; k < lay_.psds.size(); ++k) {
      const int d = lay_.psds[k];
      Eigen::MatrixXd P, U;
      smat(p.segment(psd_off_[k], svec_len(d)), d, P);
      smat(u.segment(psd_off_[k], svec_len(d)), d, U);
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(U, P, Eigen::EigenvaluesOnly |
                                                                             Eigen::Ax_lBx);
      const double lo = es.eigenvalues().minCoeff();
      if (lo < 0.0) t = std::min(t, -1.0 / lo);
    }
    return t;
  }

  const ConeLayout& layout() const { return lay_; }
  int soc_offset(std::size_t k) const { return soc_off_[k]; }
  int psd_offset(std::size_t k) const { return psd_off_[k]; }
  double soc_eta(std::size_t k) const { return soc_scale_[k].eta; }
  const Eigen::VectorXd& soc_wbar(std::size_t k) const { return soc_scale_[k].wbar; }
  const Eigen::MatrixXd& psd_R(std::size_t k) const { return psd_scale_[k].R; }
  const Eigen::MatrixXd& psd_Rinv(std::size_t k) const { return psd_scale_[k].Rinv; }

 private:
  static double smallest_positive_root(double a, double b, double c) {
    // c <= 0 at the base point; looks for the first t > 0 with
    // a t^2 + b t + c = 0.
    if (std::abs(a) < 1e-300) {
      if (b > 0.0 && c < 0.0) return -c / b;
      return kInf;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return a > 0.0 ? kInf : 0.0;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double r1 = q / a, r2 = (q != 0.0) ? c / q : kInf;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0) return r1;
    if (r2 > 0.0) return r2;
    return kInf;
  }

  void soc_apply(std::size_t k, const Eigen::VectorXd& u, Eigen::VectorXd& out,
                 bool inverse) const {
    const auto& wb = soc_scale_[k].wbar;
    const int d = static_cast<int>(wb.size());
    const double eta = soc_scale_[k].eta;
    const double beta = 1.0 / (1.0 + wb[0]);
    const double dot1 = wb.tail(d - 1).dot(u.tail(d - 1));
    out.resize(d);
    if (!inverse) {
      out[0] = wb[0] * u[0] + dot1;
      out.tail(d - 1) = u.tail(d - 1) + (u[0] + beta * dot1) * wb.tail(d - 1);
      out *= eta;
    } else {
      out[0] = wb[0] * u[0] - dot1;
      out.tail(d - 1) = u.tail(d - 1) + (-u[0] + beta * dot1) * wb.tail(d - 1);
      out /= eta;
    }
  }

  ConeLayout lay_;
  int m_ = 0;
  std::vector<int> soc_off_, psd_off_;
  Eigen::VectorXd w_nonneg_;
  struct SocScale {
    double eta = 1.0;
    Eigen::VectorXd wbar;
  };
  struct PsdScale {
    Eigen::MatrixXd R, Rinv;
    Eigen::VectorXd sigma;
  };
  std::vector<SocScale> soc_scale_;
  std::vector<PsdScale> psd_scale_;
  Eigen::VectorXd lambda_;
};

/// W^{-T} G kept block-structured: scaled sparse rows for the nonnegative
/// part, small dense panels per SOC/PSD block.
class ScaledMatrix {
 public:
  void build(const StandardForm& sf, const ConeOps& ops) {
    const auto& lay = sf.cones;
    n_ = sf.n();
    nonneg_scale_.resize(lay.nonneg);
    blocks_.clear();
    int row = lay.nonneg;
    for (std::size_t k = 0; k < lay.socs.size(); ++k) {
      blocks_.push_back(make_block(sf, row, lay.socs[k]));
      row += lay.socs[k];
    }
    for (std::size_t k = 0; k < lay.psds.size(); ++k) {
      blocks_.push_back(make_block(sf, row, svec_len(lay.psds[k])));
      row += svec_len(lay.psds[k]);
    }
    // scale
    for (int i = 0; i < lay.nonneg; ++i) nonneg_scale_[i] = 1.0;
    scale_pending_ = true;
    sf_ = &sf;
    ops_ = &ops;
  }

  void rescale() {
    const auto& lay = sf_->cones;
    // nonneg rows: multiply by 1/w_i; lambda_i = sqrt(s z), w = sqrt(s/z)
    for (int i = 0; i < lay.nonneg; ++i) nonneg_scale_[i] = 1.0;
    Eigen::VectorXd wob(lay.nonneg);
    // ask ConeOps for W^{-T} e_i implicitly: apply to unit is wasteful; use lambda/w
    // instead: W^{-T} for nonneg is diag(1/w). Recover w from scaling by applying
    // W to ones? Cheaper: keep API simple and query via apply on a ones vector.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops_->rows());
    Eigen::VectorXd winv_ones;
    ops_->apply(ConeOps::Op::kWinvT, ones, winv_ones);
    for (int i = 0; i < lay.nonneg; ++i) nonneg_scale_[i] = winv_ones[i];

    std::size_t b = 0;
    int row = lay.nonneg;
    for (std::size_t k = 0; k < lay.socs.size(); ++k, ++b) {
      scale_block(blocks_[b], row, lay.socs[k]);
      row += lay.socs[k];
    }
    for (std::size_t k = 0; k < lay.psds.size(); ++k, ++b) {
      scale_block(blocks_[b], row, svec_len(lay.psds[k]));
      row += svec_len(lay.psds[k]);
    }
    scale_pending_ = false;
  }

  /// M = Gtilde' Gtilde (dense, upper then mirrored).
  void normal_matrix(Eigen::MatrixXd& M) const {
    M.setZero(n_, n_);
    const auto& lay = sf_->cones;
    for (int r = 0; r < lay.nonneg; ++r) {
      const double f2 = nonneg_scale_[r] * nonneg_scale_[r];
      const auto& row = sf_->G[r];
      for (std::size_t p = 0; p < row.size(); ++p)
        for (std::size_t q = p; q < row.size(); ++q) {
          const double v = f2 * row[p].second * row[q].second;
          M(row[p].first, row[q].first) += v;
        }
    }
    for (const auto& blk : blocks_) {
      const int K = static_cast<int>(blk.cols.size());
      for (int p = 0; p < K; ++p)
        for (int q = p; q < K; ++q) {
          double v = blk.scaled.col(p).dot(blk.scaled.col(q));
          const int i = blk.cols[p], j = blk.cols[q];
          if (i <= j)
            M(i, j) += v;
          else
            M(j, i) += v;
        }
    }
    M = M.selfadjointView<Eigen::Upper>();
  }

  /// y = Gtilde u.
  void mul(const Eigen::VectorXd& u, Eigen::VectorXd& y) const {
    const auto& lay = sf_->cones;
    y.setZero(ops_->rows());
    for (int r = 0; r < lay.nonneg; ++r) {
      double acc = 0.0;
      for (const auto& [j, v] : sf_->G[r]) acc += v * u[j];
      y[r] = nonneg_scale_[r] * acc;
    }
    for (const auto& blk : blocks_) {
      Eigen::VectorXd ua(blk.cols.size());
      for (std::size_t p = 0; p < blk.cols.size(); ++p) ua[p] = u[blk.cols[p]];
      y.segment(blk.row0, blk.scaled.rows()) = blk.scaled * ua;
    }
  }

  /// out = Gtilde' y.
  void mul_t(const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
    const auto& lay = sf_->cones;
    out.setZero(n_);
    for (int r = 0; r < lay.nonneg; ++r) {
      const double f = nonneg_scale_[r] * y[r];
      if (f == 0.0) continue;
      for (const auto& [j, v] : sf_->G[r]) out[j] += f * v;
    }
    for (const auto& blk : blocks_) {
      Eigen::VectorXd r = blk.scaled.transpose() * y.segment(blk.row0, blk.scaled.rows());
      for (std::size_t p = 0; p < blk.cols.size(); ++p) out[blk.cols[p]] += r[p];
    }
  }

 private:
  struct Block {
    int row0 = 0;
    std::vector<int> cols;              // active columns
    Eigen::MatrixXd raw;                // block rows x active cols (unscaled)
    Eigen::MatrixXd scaled;             // W^{-T} raw
  };

  Block make_block(const StandardForm& sf, int row0, int rows) {
    Block b;
    b.row0 = row0;
    std::vector<int> colset;
    for (int r = 0; r < rows; ++r)
      for (const auto& [j, v] : sf.G[row0 + r]) colset.push_back(j);
    std::sort(colset.begin(), colset.end());
    colset.erase(std::unique(colset.begin(), colset.end()), colset.end());
    b.cols = colset;
    b.raw.setZero(rows, colset.size());
    for (int r = 0; r < rows; ++r)
      for (const auto& [j, v] : sf.G[row0 + r]) {
        const auto it = std::lower_bound(colset.begin(), colset.end(), j);
        b.raw(r, static_cast<int>(it - colset.begin())) += v;
      }
    b.scaled = b.raw;
    return b;
  }

  void scale_block(Block& blk, int row0, int rows) {
    // apply W^{-T} restricted to this block to every column
    Eigen::VectorXd tmp = Eigen::VectorXd::Zero(ops_->rows());
    Eigen::VectorXd res;
    blk.scaled.resize(rows, blk.cols.size());
    for (int p = 0; p < blk.raw.cols(); ++p) {
      tmp.segment(row0, rows) = blk.raw.col(p);
      ops_->apply(ConeOps::Op::kWinvT, tmp, res);
      blk.scaled.col(p) = res.segment(row0, rows);
      tmp.segment(row0, rows).setZero();
    }
  }

  const StandardForm* sf_ = nullptr;
  const ConeOps* ops_ = nullptr;
  int n_ = 0;
  Eigen::VectorXd nonneg_scale_;
  std::vector<Block> blocks_;
  bool scale_pending_ = true;
};

}  // namespace detail

/// Homogeneous self-dual predictor-corrector interior-point method with
/// Nesterov-Todd scaling over nonnegative, second-order and PSD cones.
/// Dense normal-equation KKT solves; sized for small problems.
class Ipm {
 public:
  IpmResult solve(const StandardForm& sf, const IpmOptions& opt = {}) const {
    using Eigen::VectorXd;
    IpmResult res;
    const int n = sf.n();
    const int m = sf.m();
    if (m != sf.cones.rows() || static_cast<int>(sf.G.size()) != m)
      throw std::invalid_argument("conic: inconsistent standard form");

    if (m == 0) {
      // unconstrained: bounded only when c = 0
      res.x.setZero(n);
      res.s.resize(0);
      res.z.resize(0);
      res.status = (sf.c.lpNorm<Eigen::Infinity>() == 0.0) ? SolveStatus::kOptimal
                                                           : SolveStatus::kUnbounded;
      return res;
    }

    detail::ConeOps ops(sf.cones);
    detail::ScaledMatrix GW;
    GW.build(sf, ops);

    VectorXd e;
    ops.identity(e);

    VectorXd x = VectorXd::Zero(n), s = e, z = e;
    double tau = 1.0, kappa = 1.0;
    const double nu = sf.cones.degree() + 1.0;

    const double hnorm = sf.h.size() ? sf.h.norm() : 0.0;
    const double cnorm = sf.c.size() ? sf.c.norm() : 0.0;

    auto mul_G = [&](const VectorXd& u, VectorXd& y) {
      y.resize(m);
      for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (const auto& [j, v] : sf.G[r]) acc += v * u[j];
        y[r] = acc;
      }
    };
    auto mul_Gt = [&](const VectorXd& y, VectorXd& out) {
      out.setZero(n);
      for (int r = 0; r < m; ++r) {
        const double f = y[r];
        if (f == 0.0) continue;
        for (const auto& [j, v] : sf.G[r]) out[j] += f * v;
      }
    };

    Eigen::MatrixXd M;
    Eigen::LLT<Eigen::MatrixXd> llt;

    // shared KKT solve for the current scaling:
    //   G' v = bx,   -G u + W'W v = bz   ->  (u, v)
    auto kkt_solve = [&](const VectorXd& bx, const VectorXd& bz, VectorXd& u, VectorXd& v) {
      VectorXd t1, gt1, rhs, Gu;
      ops.apply(detail::ConeOps::Op::kWinvT, bz, t1);
      GW.mul_t(t1, gt1);
      rhs = bx - gt1;
      u = llt.solve(rhs);
      // one step of iterative refinement
      VectorXd resid = rhs - M.selfadjointView<Eigen::Upper>() * u;
      u += llt.solve(resid);
      VectorXd gu;
      GW.mul(u, gu);
      VectorXd wv = t1 + gu;  // = W^{-T}(bz + G u)
      ops.apply(detail::ConeOps::Op::kWinv, wv, v);
      // gu is W^{-T} G u
    };

    VectorXd res_d(n), res_p(m);
    double res_g = 0.0;

    // best iterate seen, by the combined optimality measure phi
    struct Snapshot {
      VectorXd x, s, z;
      double tau = 1.0, kappa = 1.0;
      double phi = detail::kInf;
      int it = 0;
    } best;
    int stall = 0;

    int it = 0;
    for (it = 0; it < opt.max_iters; ++it) {
      // residuals of the homogeneous embedding
      VectorXd Gtz, Gx;
      mul_Gt(z, Gtz);
      mul_G(x, Gx);
      res_d = Gtz + sf.c * tau;           // want 0
      res_p = -Gx + sf.h * tau - s;       // want 0
      res_g = -sf.c.dot(x) - sf.h.dot(z) - kappa;
      const double gap = s.dot(z) + tau * kappa;
      const double mu = gap / nu;

      // convergence measures on the de-homogenized iterate
      const double pres = (Gx / tau + s / tau - sf.h).norm() / std::max(1.0, hnorm);
      const double dres = (Gtz / tau + sf.c).norm() / std::max(1.0, cnorm);
      const double pobj = sf.c.dot(x) / tau;
      const double dobj = -sf.h.dot(z) / tau;
      const double rel_gap =
          std::abs(pobj - dobj) / std::max({1.0, std::abs(pobj), std::abs(dobj)});
      const double compl_gap = (s.dot(z) / (tau * tau)) / std::max({1.0, std::abs(pobj), std::abs(dobj)});

      if (opt.verbose) {
        std::printf("it %3d  pres %9.2e dres %9.2e gap %9.2e tau %8.2e kappa %8.2e\n", it, pres,
                    dres, rel_gap, tau, kappa);
      }

      const double phi = std::max({pres, dres, std::min(rel_gap, compl_gap)});
      if (phi < 0.9 * best.phi) {
        best = {x, s, z, tau, kappa, phi, it};
        stall = 0;
      } else {
        ++stall;
      }

      if (pres <= opt.tol && dres <= opt.tol && (rel_gap <= opt.tol || compl_gap <= opt.tol)) {
        res.status = SolveStatus::kOptimal;
        break;
      }
      if (stall >= 6) break;  // numerical floor reached; grade the best iterate
      // infeasibility certificates
      const double hz = sf.h.dot(z);
      const double cx = sf.c.dot(x);
      const double pinfeas_cert =
          hz < 0.0 ? Gtz.norm() * std::max(1.0, hnorm) / (-hz) : detail::kInf;
      const double dinfeas_cert =
          cx < 0.0 ? (Gx + s).norm() * std::max(1.0, cnorm) / (-cx) : detail::kInf;
      if (pinfeas_cert <= opt.tol * 10.0) {
        res.status = SolveStatus::kInfeasible;
        break;
      }
      if (dinfeas_cert <= opt.tol * 10.0) {
        res.status = SolveStatus::kUnbounded;
        break;
      }
      if (tau < 1e-10 * std::max(1.0, kappa)) {
        // homogeneous variable collapsed: classify by the better certificate
        if (pinfeas_cert <= opt.tol_inaccurate || dinfeas_cert <= opt.tol_inaccurate) {
          res.status = pinfeas_cert <= dinfeas_cert ? SolveStatus::kInfeasible
                                                    : SolveStatus::kUnbounded;
        } else {
          res.status = SolveStatus::kError;
        }
        break;
      }

      if (!ops.compute_scaling(s, z)) {
        res.status = SolveStatus::kError;
        break;
      }
      GW.rescale();
      GW.normal_matrix(M);
      const double reg = 1e-12 * (1.0 + M.diagonal().maxCoeff());
      M.diagonal().array() += reg;
      llt.compute(M);
      if (llt.info() != Eigen::Success) {
        M.diagonal().array() += 1e6 * reg;
        llt.compute(M);
        if (llt.info() != Eigen::Success) {
          res.status = SolveStatus::kError;
          break;
        }
      }

      // constant-rhs solve used by both predictor and corrector
      VectorXd u2, v2;
      kkt_solve(-sf.c, -sf.h, u2, v2);
      const double denom_base = sf.c.dot(u2) + sf.h.dot(v2) - kappa / tau;

      const VectorXd& lam = ops.lambda();
      VectorXd lam_sq;
      ops.jprod(lam, lam, lam_sq);

      auto direction = [&](const VectorXd& d_s, double d_kappa, VectorXd& dx, VectorXd& dz,
                           VectorXd& ds, double& dtau, double& dkap) {
        VectorXd lam_div, wldiv;
        ops.jdiv_lambda(d_s, lam_div);
        ops.apply(detail::ConeOps::Op::kWt, lam_div, wldiv);
        VectorXd u1, v1;
        kkt_solve(-res_d, -res_p + wldiv, u1, v1);
        const double num = res_g - sf.c.dot(u1) - sf.h.dot(v1) - d_kappa / tau;
        dtau = num / denom_base;
        dx = u1 + dtau * u2;
        dz = v1 + dtau * v2;
        VectorXd wdz;
        ops.apply(detail::ConeOps::Op::kW, dz, wdz);
        VectorXd tmp = lam_div - wdz;
        ops.apply(detail::ConeOps::Op::kWt, tmp, ds);
        dkap = (d_kappa - kappa * dtau) / tau;
      };

      // predictor (affine)
      VectorXd dxa, dza, dsa;
      double dtaua, dkapa;
      direction(-lam_sq, -tau * kappa, dxa, dza, dsa, dtaua, dkapa);

      VectorXd rho, sig;
      ops.apply(detail::ConeOps::Op::kWinvT, dsa, rho);
      ops.apply(detail::ConeOps::Op::kW, dza, sig);
      double alpha = ops.max_step_from_lambda(rho);
      alpha = std::min(alpha, ops.max_step_from_lambda(sig));
      if (dtaua < 0.0) alpha = std::min(alpha, -tau / dtaua);
      if (dkapa < 0.0) alpha = std::min(alpha, -kappa / dkapa);
      alpha = std::min(1.0, alpha);

      const double gap_aff = (s + alpha * dsa).dot(z + alpha * dza) +
                             (tau + alpha * dtaua) * (kappa + alpha * dkapa);
      double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
      sigma = std::min(1.0, std::max(0.0, sigma));

      // corrector (combined)
      VectorXd corr, e_id;
      ops.jprod(rho, sig, corr);
      ops.identity(e_id);
      VectorXd d_s = -lam_sq - corr + sigma * mu * e_id;
      const double d_kappa = -tau * kappa - dtaua * dkapa + sigma * mu;

      VectorXd dx, dz, ds;
      double dtau, dkap;
      direction(d_s, d_kappa, dx, dz, ds, dtau, dkap);

      ops.apply(detail::ConeOps::Op::kWinvT, ds, rho);
      ops.apply(detail::ConeOps::Op::kW, dz, sig);
      double step = ops.max_step_from_lambda(rho);
      step = std::min(step, ops.max_step_from_lambda(sig));
      if (dtau < 0.0) step = std::min(step, -tau / dtau);
      if (dkap < 0.0) step = std::min(step, -kappa / dkap);
      step = std::min(1.0, opt.step_fraction * step);

      x += step * dx;
      z += step * dz;
      s += step * ds;
      tau += step * dtau;
      kappa += step * dkap;

      if (!(tau > 1e-14)) {
        res.status = SolveStatus::kError;
        break;
      }
    }

    res.iterations = it;
    if (res.status != SolveStatus::kOptimal && res.status != SolveStatus::kInfeasible &&
        res.status != SolveStatus::kUnbounded && best.phi < detail::kInf) {
      // no clean verdict: fall back to the best iterate seen
      x = best.x;
      s = best.s;
      z = best.z;
      tau = best.tau;
      kappa = best.kappa;
      if (best.phi <= opt.tol)
        res.status = SolveStatus::kOptimal;
      else if (best.phi <= opt.tol_inaccurate)
        res.status = SolveStatus::kInaccurate;
    }

    if (res.status == SolveStatus::kOptimal || res.status == SolveStatus::kInaccurate ||
        res.status == SolveStatus::kError) {
      res.x = x / tau;
      res.s = s / tau;
      res.z = z / tau;
      res.primal_objective = sf.c.dot(res.x) + sf.c0;
      res.dual_objective = -sf.h.dot(res.z) + sf.c0;
    } else {
      // certificates for infeasible / unbounded
      res.x = x;
      res.s = s;
      res.z = z;
    }
    return res;
  }
};

}  // namespace tgcmpc::conic

#endif  // TGCMPC_CONIC_IPM_HPP_
