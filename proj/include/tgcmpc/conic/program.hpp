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

#ifndef TGCMPC_CONIC_PROGRAM_HPP_
#define TGCMPC_CONIC_PROGRAM_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tgcmpc::conic {

/// Sparse linear expression  sum_i coeff_i * x_i + constant.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT(runtime/explicit)

  static LinExpr variable(int index, double coeff = 1.0) {
    LinExpr e;
    e.terms_.emplace_back(index, coeff);
    return e;
  }

  LinExpr& operator+=(const LinExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    constant_ += o.constant_;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [i, v] : o.terms_) terms_.emplace_back(i, -v);
    constant_ -= o.constant_;
    return *this;
  }
  LinExpr& operator*=(double k) {
    for (auto& [i, v] : terms_) v *= k;
    constant_ *= k;
    return *this;
  }

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double k) { return a *= k; }
  friend LinExpr operator*(double k, LinExpr a) { return a *= k; }
  friend LinExpr operator-(LinExpr a) { return a *= -1.0; }

  /// Merges duplicate variable terms and drops exact zeros.
  void compress() {
    std::sort(terms_.begin(), terms_.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size();) {
      int idx = terms_[r].first;
      double sum = 0.0;
      while (r < terms_.size() && terms_[r].first == idx) sum += terms_[r++].second;
      if (sum != 0.0) terms_[w++] = {idx, sum};
    }
    terms_.resize(w);
  }

  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

  double eval(const Eigen::VectorXd& x) const {
    double v = constant_;
    for (const auto& [i, c] : terms_) v += c * x[i];
    return v;
  }

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

/// Handle for an n x n symmetric matrix variable stored as packed lower
/// triangle (column major).
struct SymVar {
  int offset = 0;
  int n = 0;

  int index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return offset + j * n - j * (j - 1) / 2 + (i - j);
  }
  int packed_size() const { return n * (n + 1) / 2; }
};

/// Handle for a vector variable (contiguous scalar indices).
struct VecVar {
  int offset = 0;
  int n = 0;
  int index(int i) const { return offset + i; }
  LinExpr operator[](int i) const { return LinExpr::variable(offset + i); }
};

/// Dense matrix of linear expressions; the block currency of LMI assembly.
class MatExpr {
 public:
  MatExpr() = default;
  MatExpr(int rows, int cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  static MatExpr constant(const Eigen::MatrixXd& M) {
    MatExpr r(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r.at(i, j) = LinExpr(M(i, j));
    return r;
  }
  static MatExpr identity(int n, double scale = 1.0) {
    return constant(Eigen::MatrixXd::Identity(n, n) * scale);
  }
  static MatExpr zero(int rows, int cols) { return MatExpr(rows, cols); }
  static MatExpr of(const SymVar& X) {
    MatExpr r(X.n, X.n);
    for (int i = 0; i < X.n; ++i)
      for (int j = 0; j < X.n; ++j) r.at(i, j) = LinExpr::variable(X.index(i, j));
    return r;
  }
  /// Vector variable viewed as a 1 x n row (e.g. the gain row Y).
  static MatExpr row_of(const VecVar& v) {
    MatExpr r(1, v.n);
    for (int j = 0; j < v.n; ++j) r.at(0, j) = LinExpr::variable(v.index(j));
    return r;
  }
  static MatExpr diag(const std::vector<LinExpr>& d) {
    MatExpr r(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) r.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return r;
  }

  LinExpr& at(int i, int j) { return e_[i * cols_ + j]; }
  const LinExpr& at(int i, int j) const { return e_[i * cols_ + j]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  MatExpr transpose() const {
    MatExpr r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  friend MatExpr operator+(const MatExpr& a, const MatExpr& b) {
    MatExpr r = a;
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r.at(i, j) += b.at(i, j);
    return r;
  }
  friend MatExpr operator-(const MatExpr& a, const MatExpr& b) {
    MatExpr r = a;
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r.at(i, j) -= b.at(i, j);
    return r;
  }
  friend MatExpr operator*(double k, const MatExpr& a) {
    MatExpr r = a;
    for (auto& e : r.e_) e *= k;
    return r;
  }
  friend MatExpr operator-(const MatExpr& a) { return -1.0 * a; }
  friend MatExpr operator*(const Eigen::MatrixXd& A, const MatExpr& B) {
    MatExpr r(static_cast<int>(A.rows()), B.cols_);
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) {
        LinExpr acc;
        for (int k = 0; k < B.rows_; ++k) {
          if (A(i, k) != 0.0) acc += A(i, k) * B.at(k, j);
        }
        r.at(i, j) = acc;
      }
    return r;
  }
  friend MatExpr operator*(const MatExpr& A, const Eigen::MatrixXd& B) {
    MatExpr r(A.rows_, static_cast<int>(B.cols()));
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) {
        LinExpr acc;
        for (int k = 0; k < A.cols_; ++k) {
          if (B(k, j) != 0.0) acc += A.at(i, k) * B(k, j);
        }
        r.at(i, j) = acc;
      }
    return r;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<LinExpr> e_;
};

/// Assembles a symmetric block matrix from its upper (or lower) blocks,
/// mirroring the unset side — the "star" convention of block LMIs.
class SymBlockBuilder {
 public:
  explicit SymBlockBuilder(std::vector<int> block_sizes) : sizes_(std::move(block_sizes)) {
    offsets_.resize(sizes_.size());
    int off = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      offsets_[i] = off;
      off += sizes_[i];
    }
    total_ = off;
    mat_ = MatExpr(total_, total_);
    set_.assign(sizes_.size() * sizes_.size(), false);
  }

  SymBlockBuilder& set(int bi, int bj, const MatExpr& blk) {
    if (blk.rows() != sizes_[bi] || blk.cols() != sizes_[bj])
      throw std::invalid_argument("conic: block size mismatch");
    place(bi, bj, blk);
    if (bi != bj) place(bj, bi, blk.transpose());
    return *this;
  }

  /// Finished symmetric matrix; unset blocks stay zero.
  MatExpr build() const { return mat_; }

 private:
  void place(int bi, int bj, const MatExpr& blk) {
    for (int i = 0; i < blk.rows(); ++i)
      for (int j = 0; j < blk.cols(); ++j) mat_.at(offsets_[bi] + i, offsets_[bj] + j) = blk.at(i, j);
    set_[bi * sizes_.size() + bj] = true;
  }

  std::vector<int> sizes_, offsets_;
  int total_ = 0;
  MatExpr mat_;
  std::vector<bool> set_;
};

// --- packed symmetric (svec) helpers; off-diagonals scaled by sqrt(2) so
// that <svec(A), svec(B)> = <A, B>. Lower triangle, column major.

inline int svec_len(int n) { return n * (n + 1) / 2; }

inline void svec(const Eigen::MatrixXd& A, Eigen::VectorXd& out) {
  const int n = static_cast<int>(A.rows());
  const double rt2 = std::sqrt(2.0);
  out.resize(svec_len(n));
  int t = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) out[t++] = (i == j) ? A(i, j) : rt2 * 0.5 * (A(i, j) + A(j, i));
}

inline void smat(const Eigen::VectorXd& v, int n, Eigen::MatrixXd& out) {
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  out.resize(n, n);
  int t = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      const double val = (i == j) ? v[t] : inv_rt2 * v[t];
      out(i, j) = val;
      out(j, i) = val;
      ++t;
    }
}

enum class SolveStatus { kOptimal, kInaccurate, kInfeasible, kUnbounded, kError };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInaccurate: return "inaccurate";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

/// A conic program: scalar/vector/symmetric-matrix variables, a linear
/// objective, and constraints tagged by cone.
class Program {
 public:
  int add_scalar(std::string name = {}) {
    names_.push_back(name.empty() ? "x" + std::to_string(n_) : std::move(name));
    return n_++;
  }
  VecVar add_vector(const std::string& name, int dim) {
    VecVar v{n_, dim};
    for (int i = 0; i < dim; ++i) names_.push_back(name + "[" + std::to_string(i) + "]");
    n_ += dim;
    return v;
  }
  SymVar add_symmetric(const std::string& name, int dim) {
    SymVar s{n_, dim};
    for (int j = 0; j < dim; ++j)
      for (int i = j; i < dim; ++i)
        names_.push_back(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
    n_ += s.packed_size();
    return s;
  }
  int num_vars() const { return n_; }
  const std::string& var_name(int i) const { return names_[i]; }

  void minimize(LinExpr objective) { obj_ = std::move(objective); }
  const LinExpr& objective() const { return obj_; }

  void add_eq(LinExpr e, std::string name = {}) { eqs_.push_back({std::move(e), std::move(name)}); }
  /// expr <= 0
  void add_le(LinExpr e, std::string name = {}) { les_.push_back({std::move(e), std::move(name)}); }
  /// rows[0] >= || rows[1:] ||_2
  void add_soc(std::vector<LinExpr> rows, std::string name = {}) {
    if (rows.size() < 2) throw std::invalid_argument("conic: SOC needs dimension >= 2");
    socs_.push_back({std::move(rows), std::move(name)});
  }
  /// M(x) >= 0 (PSD); M is symmetrized as (M + M')/2 before use.
  void add_psd(const MatExpr& M, std::string name = {}) {
    if (M.rows() != M.cols()) throw std::invalid_argument("conic: PSD block must be square");
    MatExpr sym(M.rows(), M.cols());
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j) {
        LinExpr e = 0.5 * M.at(i, j) + 0.5 * M.at(j, i);
        e.compress();
        sym.at(i, j) = e;
      }
    psds_.push_back({sym, std::move(name)});
  }

  struct EqCon {
    LinExpr e;
    std::string name;
  };
  struct SocCon {
    std::vector<LinExpr> rows;
    std::string name;
  };
  struct PsdCon {
    MatExpr M;
    std::string name;
  };

  const std::vector<EqCon>& eqs() const { return eqs_; }
  const std::vector<EqCon>& les() const { return les_; }
  const std::vector<SocCon>& socs() const { return socs_; }
  const std::vector<PsdCon>& psds() const { return psds_; }

  /// Worst constraint violation at x (positive means violated by that much).
  double max_violation(const Eigen::VectorXd& x) const {
    double worst = 0.0;
    for (const auto& c : eqs_) worst = std::max(worst, std::abs(c.e.eval(x)));
    for (const auto& c : les_) worst = std::max(worst, c.e.eval(x));
    for (const auto& c : socs_) {
      double t = c.rows[0].eval(x);
      double nrm = 0.0;
      for (std::size_t i = 1; i < c.rows.size(); ++i) {
        const double v = c.rows[i].eval(x);
        nrm += v * v;
      }
      worst = std::max(worst, std::sqrt(nrm) - t);
    }
    for (const auto& c : psds_) {
      Eigen::MatrixXd M(c.M.rows(), c.M.cols());
      for (int i = 0; i < c.M.rows(); ++i)
        for (int j = 0; j < c.M.cols(); ++j) M(i, j) = c.M.at(i, j).eval(x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    return worst;
  }

  /// Human-readable constraint listing; debugging aid, not a stable format.
  void dump(std::ostream& os) const {
    auto print_expr = [&](const LinExpr& e) {
      bool first = true;
      for (const auto& [i, v] : e.terms()) {
        os << (first ? "" : " + ") << v << "*" << names_[i];
        first = false;
      }
      if (e.constant() != 0.0 || first) os << (first ? "" : " + ") << e.constant();
    };
    os << "minimize ";
    print_expr(obj_);
    os << "\n";
    for (const auto& c : eqs_) {
      os << "  [eq " << c.name << "] ";
      print_expr(c.e);
      os << " == 0\n";
    }
    for (const auto& c : les_) {
      os << "  [le " << c.name << "] ";
      print_expr(c.e);
      os << " <= 0\n";
    }
    for (const auto& c : socs_) {
      os << "  [soc " << c.name << " dim " << c.rows.size() << "]\n";
    }
    for (const auto& c : psds_) {
      os << "  [psd " << c.name << " " << c.M.rows() << "x" << c.M.cols() << "]\n";
    }
  }

 private:
  int n_ = 0;
  std::vector<std::string> names_;
  LinExpr obj_;
  std::vector<EqCon> eqs_, les_;
  std::vector<SocCon> socs_;
  std::vector<PsdCon> psds_;
};

/// Result of a solve, in the program's original variables.
struct Solution {
  SolveStatus status = SolveStatus::kError;
  Eigen::VectorXd x;       ///< per-variable primal values (valid for optimal/inaccurate)
  double objective = 0.0;  ///< includes the objective's constant term
  double max_violation = 0.0;
  int iterations = 0;
  double solve_time_s = 0.0;

  bool has_values() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kInaccurate;
  }
  double value(int scalar) const { return x[scalar]; }
  Eigen::VectorXd value(const VecVar& v) const { return x.segment(v.offset, v.n); }
  Eigen::MatrixXd value(const SymVar& s) const {
    Eigen::MatrixXd M(s.n, s.n);
    for (int i = 0; i < s.n; ++i)
      for (int j = 0; j < s.n; ++j) M(i, j) = x[s.index(i, j)];
    return M;
  }
};

}  // namespace tgcmpc::conic

#endif  // TGCMPC_CONIC_PROGRAM_HPP_
