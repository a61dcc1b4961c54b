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

#ifndef TGCMPC_RCI_HPP_
#define TGCMPC_RCI_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgcmpc/polytope.hpp"
#include "tgcmpc/tire.hpp"
#include "tgcmpc/vehicle_model.hpp"

namespace tgcmpc {

/// Speed-indexed slip/steering envelope data for the (v_y, r; delta) space.
struct EnvelopeSpec {
  double alpha_f_peak = 0.0;  ///< [rad]
  double alpha_r_peak = 0.0;  ///< [rad]
  double delta_max = 0.0;     ///< [rad]
  double vx = 0.0;            ///< [m/s]
  double a = 0.0;             ///< CG to front axle [m]
  double b = 0.0;             ///< CG to rear axle [m]
};

struct EnvelopeConstraints {
  Eigen::MatrixXd Hx;  ///< 6 x 2 over (v_y, r)
  Eigen::MatrixXd Hu;  ///< 6 x 1 over delta
  Eigen::VectorXd g;   ///< 6

  /// The feasible set as a polytope over (v_y, r, delta).
  Polytope combined() const {
    Eigen::MatrixXd H(Hx.rows(), Hx.cols() + Hu.cols());
    H.leftCols(Hx.cols()) = Hx;
    H.rightCols(Hu.cols()) = Hu;
    return Polytope(H, g);
  }
};

/// Small-angle front slip, rear slip and mechanical steering limits, each
/// with its mirrored row:
///   v_y + a r - vx delta <= vx alpha_f_peak
///   v_y - b r            <= vx alpha_r_peak
///   delta                <= delta_max
inline EnvelopeConstraints envelope_constraints(const EnvelopeSpec& spec) {
  if (!(spec.alpha_f_peak > 0.0 && spec.alpha_r_peak > 0.0 && spec.delta_max > 0.0 &&
        spec.vx > 0.0 && spec.a > 0.0 && spec.b > 0.0))
    throw std::invalid_argument("rci: envelope spec entries must be positive");
  EnvelopeConstraints c;
  c.Hx.resize(6, 2);
  c.Hu.resize(6, 1);
  c.g.resize(6);
  c.Hx << 1.0, spec.a,   //
      1.0, -spec.b,      //
      0.0, 0.0,          //
      -1.0, -spec.a,     //
      -1.0, spec.b,      //
      0.0, 0.0;
  c.Hu << -spec.vx, 0.0, 1.0, spec.vx, 0.0, -1.0;
  c.g << spec.vx * spec.alpha_f_peak, spec.vx * spec.alpha_r_peak, spec.delta_max,
      spec.vx * spec.alpha_f_peak, spec.vx * spec.alpha_r_peak, spec.delta_max;
  return c;
}

struct RciResult {
  Polytope set;           ///< over (v_y, r)
  int iterations = 0;
  bool converged = false;
  bool monotone = true;   ///< every iterate contained in its predecessor
};

struct RciOptions {
  int max_iters = 200;
  double tol = 1e-6;  ///< set-equality tolerance on normalized rows
};

/// Backward recursion for the maximal robust controllable invariant set of
/// the discrete-time vertex systems inside the envelope:
///   R_0 = Proj_x(C),  S_i = preimage(R_k; A_i, B_i),
///   R_{k+1} = Proj_x(C  intersect  all S_i),
/// stopping at R_{k+1} = R_k or the iteration cap.
inline RciResult maximal_rci(const std::vector<VertexSystem>& vertices,
                             const EnvelopeConstraints& con, const RciOptions& opt = {}) {
  if (vertices.empty()) throw std::invalid_argument("rci: need at least one vertex system");
  const int nx = static_cast<int>(vertices[0].A.rows());
  const int nu = static_cast<int>(vertices[0].B.cols());
  const Polytope C = con.combined();
  if (C.dim() != nx + nu) throw std::invalid_argument("rci: constraint dimension mismatch");
  std::vector<int> xcoords(nx);
  for (int i = 0; i < nx; ++i) xcoords[i] = i;

  RciResult out;
  Polytope R = C.project(xcoords);
  for (int it = 1; it <= opt.max_iters; ++it) {
    Polytope S = C;
    for (const auto& v : vertices) S = intersect(S, preimage(R, v.A, v.B));
    if (S.is_empty()) throw std::runtime_error("rci: recursion produced an empty set");
    const Polytope next = S.project(xcoords);
    out.iterations = it;
    if (!is_subset(next, R, 10.0 * opt.tol)) out.monotone = false;
    if (set_equals(next, R, opt.tol)) {
      out.set = next;
      out.converged = true;
      return out;
    }
    R = next;
  }
  out.set = R;
  out.converged = false;
  return out;
}

/// Yaw-rate/rear-slip envelope baseline: |linearized rear slip| bounded by
/// its peak and |r| bounded by the steady-state yaw limit
///   r_max = (mu g / vx) (a b + max(a,b)^2) / (min(a,b) (a + b)).
inline double steady_state_yaw_limit(const VehicleParams& p, double mu, double vx) {
  if (!(vx > 0.0)) throw std::invalid_argument("rci: vx must be positive");
  const double num = p.a * p.b + std::max(p.a, p.b) * std::max(p.a, p.b);
  const double den = std::min(p.a, p.b) * (p.a + p.b);
  return mu * p.gravity / vx * num / den;
}

inline Polytope beal_envelope(const VehicleParams& p, double mu, double vx,
                              double alpha_r_peak) {
  const double rmax = steady_state_yaw_limit(p, mu, vx);
  Eigen::MatrixXd H(4, 2);
  Eigen::VectorXd g(4);
  H << 1.0, -p.b,  //
      -1.0, p.b,   //
      0.0, 1.0,    //
      0.0, -1.0;
  g << vx * alpha_r_peak, vx * alpha_r_peak, rmax, rmax;
  return Polytope(H, g);
}

/// Vertex systems of the lateral (v_y, r) sub-dynamics, discretized at Ts.
inline std::vector<VertexSystem> lateral_vertices_discrete(const UncertainLinearModel& mdl,
                                                           double Ts) {
  const LateralSubmodel sub = lateral_submodel(mdl);
  std::vector<VertexSystem> out;
  for (double gf : {-1.0, 1.0})
    for (double gr : {-1.0, 1.0}) {
      Eigen::Matrix2d delta = Eigen::Vector2d(gf, gr).asDiagonal();
      const Eigen::MatrixXd Ac = sub.A + sub.Bw * delta * sub.Cy;
      const Eigen::MatrixXd Bc = sub.Bu + sub.Bw * delta * sub.Dyu;
      VertexSystem v;
      zoh_discretize(Ac, Bc, Ts, v.A, v.B);
      out.push_back(std::move(v));
    }
  return out;
}

struct RciBankEntry {
  double vx = 0.0;
  RciResult result;
};

struct RciBankReport {
  std::vector<RciBankEntry> entries;
  std::vector<std::string> warnings;
};

/// One converged invariant set per grid speed; per-speed failures are
/// reported, not fatal.
inline RciBankReport build_rci_bank(const VehicleParams& p, const TireDerived& tf,
                                    const TireDerived& tr, const std::vector<double>& speeds,
                                    double Ts = 0.025, const RciOptions& opt = {}) {
  if (speeds.empty()) throw std::invalid_argument("rci: empty speed grid");
  RciBankReport report;
  for (double vx : speeds) {
    EnvelopeSpec spec{tf.alpha_peak, tr.alpha_peak, p.delta_max, vx, p.a, p.b};
    try {
      const UncertainLinearModel mdl = build_uncertain_model(p, vx, tf, tr);
      RciResult res = maximal_rci(lateral_vertices_discrete(mdl, Ts),
                                  envelope_constraints(spec), opt);
      if (!res.converged)
        report.warnings.push_back("vx " + std::to_string(vx) + ": no convergence after " +
                                  std::to_string(res.iterations) + " iterations");
      report.entries.push_back({vx, std::move(res)});
    } catch (const std::exception& e) {
      report.warnings.push_back("vx " + std::to_string(vx) + ": " + e.what());
    }
  }
  return report;
}

}  // namespace tgcmpc

#endif  // TGCMPC_RCI_HPP_
