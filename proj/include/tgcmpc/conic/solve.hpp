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

#ifndef TGCMPC_CONIC_SOLVE_HPP_
#define TGCMPC_CONIC_SOLVE_HPP_

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tgcmpc/conic/ipm.hpp"
#include "tgcmpc/conic/program.hpp"

namespace tgcmpc::conic {

/// Lean backends handle LP + SOCP (enough for the online problem); the
/// full profile adds PSD cones and is required for offline synthesis.
enum class Profile { kLean, kFull };

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual Profile profile() const = 0;
  virtual IpmResult solve_standard(const StandardForm& sf, const IpmOptions& opt) const = 0;
};

/// The built-in dense NT-scaled homogeneous self-dual interior-point method.
class DenseIpmBackend final : public SolverBackend {
 public:
  explicit DenseIpmBackend(Profile profile = Profile::kFull) : profile_(profile) {}
  std::string name() const override { return "dense-nt-ipm"; }
  Profile profile() const override { return profile_; }
  IpmResult solve_standard(const StandardForm& sf, const IpmOptions& opt) const override {
    if (profile_ == Profile::kLean && !sf.cones.psds.empty())
      throw std::runtime_error("conic: lean backend cannot solve PSD constraints");
    return Ipm{}.solve(sf, opt);
  }

 private:
  Profile profile_;
};

namespace detail {

struct Compiled {
  StandardForm sf;
  // equality data (before elimination)
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int n_orig = 0;
};

inline void append_row(StandardForm& sf, const LinExpr& e, double sign_terms, double sign_const) {
  LinExpr c = e;
  c.compress();
  std::vector<std::pair<int, double>> row;
  row.reserve(c.terms().size());
  for (const auto& [i, v] : c.terms()) row.emplace_back(i, sign_terms * v);
  sf.G.push_back(std::move(row));
  const int r = static_cast<int>(sf.h.size());
  sf.h.conservativeResize(r + 1);
  sf.h[r] = sign_const * c.constant();
}

inline Compiled compile(const Program& p) {
  Compiled out;
  StandardForm& sf = out.sf;
  out.n_orig = p.num_vars();
  sf.c.setZero(p.num_vars());
  LinExpr obj = p.objective();
  obj.compress();
  for (const auto& [i, v] : obj.terms()) sf.c[i] += v;
  sf.c0 = obj.constant();
  sf.h.resize(0);

  // nonnegative rows: expr <= 0  ->  s = -expr >= 0,  s = h - Gx
  for (const auto& c : p.les()) append_row(sf, c.e, +1.0, -1.0);
  sf.cones.nonneg = static_cast<int>(sf.G.size());

  // SOC blocks: s = (t, v) itself
  for (const auto& c : p.socs()) {
    for (const auto& r : c.rows) append_row(sf, r, -1.0, +1.0);
    sf.cones.socs.push_back(static_cast<int>(c.rows.size()));
  }

  // PSD blocks in svec packing
  const double rt2 = std::sqrt(2.0);
  for (const auto& c : p.psds()) {
    const int n = c.M.rows();
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i) {
        LinExpr e = c.M.at(i, j);
        if (i != j) e *= rt2;
        append_row(sf, e, -1.0, +1.0);
      }
    sf.cones.psds.push_back(n);
  }

  // equalities kept dense for nullspace elimination
  out.A.setZero(static_cast<int>(p.eqs().size()), p.num_vars());
  out.b.setZero(static_cast<int>(p.eqs().size()));
  for (std::size_t k = 0; k < p.eqs().size(); ++k) {
    LinExpr e = p.eqs()[k].e;
    e.compress();
    for (const auto& [i, v] : e.terms()) out.A(static_cast<int>(k), i) += v;
    out.b[static_cast<int>(k)] = -e.constant();
  }
  return out;
}

}  // namespace detail

struct SolveOptions {
  IpmOptions ipm;
  double feas_tol = 1e-6;  ///< post-hoc verification tolerance
};

/// Compiles and solves a conic program. Equality constraints are removed by
/// nullspace elimination before the cone solver runs. Every solution with
/// values is re-verified against the original constraints; a violation
/// demotes the status.
inline Solution solve(const Program& p, const SolverBackend& backend,
                      const SolveOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  detail::Compiled cp = detail::compile(p);

  Eigen::VectorXd xp;                      // particular solution of equalities
  Eigen::MatrixXd Z;                       // nullspace basis
  const bool has_eqs = cp.A.rows() > 0;
  StandardForm reduced;
  const StandardForm* active = &cp.sf;

  if (has_eqs) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cp.A);
    xp = qr.solve(cp.b);
    if ((cp.A * xp - cp.b).lpNorm<Eigen::Infinity>() >
        1e-9 * (1.0 + cp.b.lpNorm<Eigen::Infinity>())) {
      sol.status = SolveStatus::kInfeasible;
      sol.solve_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return sol;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cp.A);
    lu.setThreshold(1e-10);
    Z = lu.kernel();
    if (lu.dimensionOfKernel() == 0) Z.resize(cp.n_orig, 0);

    reduced.c = Z.transpose() * cp.sf.c;
    reduced.c0 = cp.sf.c0 + cp.sf.c.dot(xp);
    reduced.cones = cp.sf.cones;
    reduced.h.resize(cp.sf.m());
    reduced.G.resize(cp.sf.m());
    for (int r = 0; r < cp.sf.m(); ++r) {
      Eigen::VectorXd arow = Eigen::VectorXd::Zero(cp.n_orig);
      for (const auto& [j, v] : cp.sf.G[r]) arow[j] += v;
      reduced.h[r] = cp.sf.h[r] - arow.dot(xp);
      Eigen::VectorXd zrow = Z.transpose() * arow;
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < zrow.size(); ++j)
        if (zrow[j] != 0.0) row.emplace_back(j, zrow[j]);
      reduced.G[r] = std::move(row);
    }
    active = &reduced;
  }

  IpmResult r = backend.solve_standard(*active, opt.ipm);
  sol.status = r.status;
  sol.iterations = r.iterations;
  if (r.status == SolveStatus::kOptimal || r.status == SolveStatus::kInaccurate) {
    sol.x = has_eqs ? Eigen::VectorXd(xp + Z * r.x) : r.x;
    sol.objective = p.objective().eval(sol.x);
    sol.max_violation = p.max_violation(sol.x);
    const double scale = 1.0 + (sol.x.size() ? sol.x.cwiseAbs().maxCoeff() : 0.0);
    if (sol.max_violation > opt.feas_tol * scale) sol.status = SolveStatus::kInaccurate;
    if (sol.max_violation > 1e-3 * scale) sol.status = SolveStatus::kError;
  }
  sol.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

inline Solution solve(const Program& p, const SolveOptions& opt = {}) {
  static const DenseIpmBackend backend(Profile::kFull);
  return solve(p, backend, opt);
}

// ---------------------------------------------------------------------------
// Fast path for the many small LPs of the polytope machinery:
//   maximize obj'x  s.t.  H x <= g
// ---------------------------------------------------------------------------

struct LpResult {
  SolveStatus status = SolveStatus::kError;
  Eigen::VectorXd x;
  double value = 0.0;  ///< max objective (valid when optimal/inaccurate)
};

inline LpResult lp_maximize(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                            const Eigen::VectorXd& obj, const IpmOptions& opt = {}) {
  StandardForm sf;
  const int n = static_cast<int>(H.cols());
  const int m = static_cast<int>(H.rows());
  sf.c = -obj;
  sf.h = g;
  sf.G.resize(m);
  for (int r = 0; r < m; ++r) {
    auto& row = sf.G[r];
    for (int j = 0; j < n; ++j)
      if (H(r, j) != 0.0) row.emplace_back(j, H(r, j));
  }
  sf.cones.nonneg = m;
  IpmResult r = Ipm{}.solve(sf, opt);
  LpResult out;
  out.status = r.status;
  if (r.status == SolveStatus::kOptimal || r.status == SolveStatus::kInaccurate) {
    out.x = r.x;
    out.value = obj.dot(r.x);
  }
  return out;
}

}  // namespace tgcmpc::conic

#endif  // TGCMPC_CONIC_SOLVE_HPP_
