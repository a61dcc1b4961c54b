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

#ifndef TGCMPC_VEHICLE_MODEL_HPP_
#define TGCMPC_VEHICLE_MODEL_HPP_

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgcmpc/tire.hpp"

namespace tgcmpc {

/// State ordering of the tracking model, recorded in every serialized
/// artifact to guard against silent permutations.
inline constexpr const char* kStateOrdering = "e_y,e_psi,v_y,r";

struct VehicleParams {
  double m = 0.0;          ///< mass [kg]
  double Iz = 0.0;         ///< yaw inertia [kg m^2]
  double a = 0.0;          ///< CG to front axle [m]
  double b = 0.0;          ///< CG to rear axle [m]
  double d_m = 0.0;        ///< CG to cross-track reference point [m]
  double delta_max = 0.0;  ///< steering limit [rad]
  double gravity = 9.81;   ///< [m/s^2]
  TireParams front;
  TireParams rear;

  void validate() const {
    if (!(m > 0.0 && Iz > 0.0 && a > 0.0 && b > 0.0 && delta_max > 0.0))
      throw std::invalid_argument("vehicle: m, Iz, a, b, delta_max must be positive");
    const double fzf = m * gravity * b / (a + b);
    const double fzr = m * gravity * a / (a + b);
    if (std::abs(front.Fz - fzf) > 1e-9 * fzf || std::abs(rear.Fz - fzr) > 1e-9 * fzr)
      throw std::invalid_argument("vehicle: tire normal loads must match m g b/(a+b), m g a/(a+b)");
  }

  /// Fills both normal loads from the static weight distribution.
  void set_static_loads() {
    front.Fz = m * gravity * b / (a + b);
    rear.Fz = m * gravity * a / (a + b);
  }
};

struct NonlinearState {
  double vx = 0.0;  ///< longitudinal velocity [m/s]
  double vy = 0.0;  ///< lateral velocity [m/s]
  double r = 0.0;   ///< yaw rate [rad/s]
  // pose for trajectory replay
  double X = 0.0;
  double Y = 0.0;
  double psi = 0.0;
};

/// Nonlinear brush-tire bicycle truth model.
class NonlinearBicycle {
 public:
  explicit NonlinearBicycle(const VehicleParams& p) : p_(p) {
    p_.validate();
    front_ = derive_tire(p.front);
    rear_ = derive_tire(p.rear);
  }
  NonlinearBicycle(const VehicleParams& p, const TireDerived& front, const TireDerived& rear)
      : p_(p), front_(front), rear_(rear) {
    p_.validate();
  }

  const VehicleParams& params() const { return p_; }
  const TireDerived& front_tire() const { return front_; }
  const TireDerived& rear_tire() const { return rear_; }

  std::pair<double, double> slip_angles(const NonlinearState& s, double delta) const {
    if (s.vx <= 0.1) throw std::domain_error("vehicle: slip angles undefined at vx <= 0.1 m/s");
    const double af = std::atan((s.vy + p_.a * s.r) / s.vx) - delta;
    const double ar = std::atan((s.vy - p_.b * s.r) / s.vx);
    return {af, ar};
  }

  /// Time derivative of (vx, vy, r, X, Y, psi) under front steering and a
  /// longitudinal front-axle force.
  NonlinearState derivative(const NonlinearState& s, double delta, double Fxf) const {
    const auto [af, ar] = slip_angles(s, delta);
    const double Fyf = lateral_force(front_, af);
    const double Fyr = lateral_force(rear_, ar);
    const double cd = std::cos(delta), sd = std::sin(delta);
    NonlinearState d;
    d.vx = (Fxf * cd - Fyf * sd) / p_.m + s.r * s.vy;
    d.vy = (Fxf * sd + Fyf * cd + Fyr) / p_.m - s.r * s.vx;
    d.r = (p_.a * Fxf * sd + p_.a * Fyf * cd - p_.b * Fyr) / p_.Iz;
    d.X = s.vx * std::cos(s.psi) - s.vy * std::sin(s.psi);
    d.Y = s.vx * std::sin(s.psi) + s.vy * std::cos(s.psi);
    d.psi = s.r;
    return d;
  }

  /// One RK4 step.
  NonlinearState step(const NonlinearState& s, double delta, double Fxf, double dt) const {
    auto add = [](const NonlinearState& x, const NonlinearState& k, double h) {
      NonlinearState y = x;
      y.vx += h * k.vx;
      y.vy += h * k.vy;
      y.r += h * k.r;
      y.X += h * k.X;
      y.Y += h * k.Y;
      y.psi += h * k.psi;
      return y;
    };
    const NonlinearState k1 = derivative(s, delta, Fxf);
    const NonlinearState k2 = derivative(add(s, k1, 0.5 * dt), delta, Fxf);
    const NonlinearState k3 = derivative(add(s, k2, 0.5 * dt), delta, Fxf);
    const NonlinearState k4 = derivative(add(s, k3, dt), delta, Fxf);
    NonlinearState out = s;
    out.vx += dt / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    out.vy += dt / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    out.r += dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    out.X += dt / 6.0 * (k1.X + 2.0 * k2.X + 2.0 * k3.X + k4.X);
    out.Y += dt / 6.0 * (k1.Y + 2.0 * k2.Y + 2.0 * k3.Y + k4.Y);
    out.psi += dt / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    return out;
  }

 private:
  VehicleParams p_;
  TireDerived front_, rear_;
};

/// Diagonal norm-bounded uncertainty: s blocks, here two 1x1 gains
/// (front and rear tire cone gains).
struct UncertaintyStructure {
  int s = 2;
  std::vector<int> n_q{1, 1};
  std::vector<int> n_p{1, 1};
};

/// Frenet-frame tracking model with norm-bounded multiplicative tire
/// uncertainty, state [e_y, e_psi, v_y, r], input delta, reference
/// input the path curvature.
struct UncertainLinearModel {
  Eigen::Matrix4d A;
  Eigen::Vector4d Bu;
  Eigen::Matrix<double, 4, 2> Bw;
  Eigen::Vector4d Br;
  Eigen::Matrix<double, 2, 4> Cy;
  Eigen::Vector2d Dyu;
  double vx_design = 0.0;
  UncertaintyStructure structure;
};

inline UncertainLinearModel build_uncertain_model(const VehicleParams& p, double vx,
                                                  const TireDerived& tf, const TireDerived& tr) {
  if (vx < 3.0) throw std::domain_error("vehicle: linear model scheduled for vx >= 3 m/s");
  p.validate();
  UncertainLinearModel m;
  const double cbf = tf.C_bar, cbr = tr.C_bar;
  const double dcf = tf.dC, dcr = tr.dC;
  m.A << 0.0, vx, 1.0, p.d_m,                                                  //
      0.0, 0.0, 0.0, 1.0,                                                      //
      0.0, 0.0, -(cbf + cbr) / (p.m * vx), -(p.a * cbf - p.b * cbr) / (p.m * vx) - vx,  //
      0.0, 0.0, -(p.a * cbf - p.b * cbr) / (p.Iz * vx),
      -(p.a * p.a * cbf + p.b * p.b * cbr) / (p.Iz * vx);
  m.Bu << 0.0, 0.0, cbf / p.m, p.a * cbf / p.Iz;
  m.Bw << 0.0, 0.0,  //
      0.0, 0.0,      //
      -1.0 / (p.m * vx), 1.0 / (p.m * vx),  //
      -p.a / (p.Iz * vx), -p.b / (p.Iz * vx);
  m.Br << 0.0, -vx, 0.0, 0.0;
  m.Cy << 0.0, 0.0, dcf, p.a * dcf,  //
      0.0, 0.0, -dcr, p.b * dcr;
  m.Dyu << -dcf, 0.0;
  m.vx_design = vx;
  return m;
}

struct VertexSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

/// The four vertex systems of the diagonal uncertainty, in the fixed order
/// (gamma_f, gamma_r) = (-,-), (-,+), (+,-), (+,+).
inline std::array<VertexSystem, 4> enumerate_vertices(const UncertainLinearModel& m) {
  std::array<VertexSystem, 4> out;
  int k = 0;
  for (double gf : {-1.0, 1.0})
    for (double gr : {-1.0, 1.0}) {
      Eigen::Matrix2d delta = Eigen::Vector2d(gf, gr).asDiagonal();
      out[k].A = m.A + m.Bw * delta * m.Cy;
      out[k].B = m.Bu + m.Bw * delta * m.Dyu;
      ++k;
    }
  return out;
}

/// Exact zero-order-hold discretization via the augmented matrix
/// exponential; inputs held constant over the sample period.
inline void zoh_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double Ts,
                           Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd) {
  const int n = static_cast<int>(A.rows());
  const int nu = static_cast<int>(B.cols());
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + nu, n + nu);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, nu) = B;
  const Eigen::MatrixXd e = (aug * Ts).exp();
  Ad = e.topLeftCorner(n, n);
  Bd = e.topRightCorner(n, nu);
}

struct DiscreteModel {
  Eigen::Matrix4d Ad;
  Eigen::Vector4d Bdu;
  Eigen::Matrix<double, 4, 2> Bdw;
  Eigen::Vector4d Bdr;
  Eigen::Matrix<double, 2, 4> Cy;  ///< unchanged by exact discretization
  Eigen::Vector2d Dyu;             ///< unchanged by exact discretization
  double Ts = 0.0;
};

inline DiscreteModel discretize(const UncertainLinearModel& m, double Ts) {
  if (!(Ts > 0.0)) throw std::invalid_argument("vehicle: Ts must be positive");
  Eigen::MatrixXd B(4, 4);
  B.col(0) = m.Bu;
  B.col(1) = m.Bw.col(0);
  B.col(2) = m.Bw.col(1);
  B.col(3) = m.Br;
  Eigen::MatrixXd Ad, Bd;
  zoh_discretize(m.A, B, Ts, Ad, Bd);
  DiscreteModel d;
  d.Ad = Ad;
  d.Bdu = Bd.col(0);
  d.Bdw.col(0) = Bd.col(1);
  d.Bdw.col(1) = Bd.col(2);
  d.Bdr = Bd.col(3);
  d.Cy = m.Cy;
  d.Dyu = m.Dyu;
  d.Ts = Ts;
  return d;
}

/// Lateral (v_y, r) dynamics sub-block, the space the envelope constraints
/// and the invariant-set recursion live in.
struct LateralSubmodel {
  Eigen::Matrix2d A;
  Eigen::Vector2d Bu;
  Eigen::Matrix2d Bw;
  Eigen::Matrix2d Cy;
  Eigen::Vector2d Dyu;
  double vx_design = 0.0;
  UncertaintyStructure structure;
};

inline LateralSubmodel lateral_submodel(const UncertainLinearModel& m) {
  LateralSubmodel s;
  s.A = m.A.bottomRightCorner<2, 2>();
  s.Bu = m.Bu.tail<2>();
  s.Bw = m.Bw.bottomRows<2>();
  s.Cy = m.Cy.rightCols<2>();
  s.Dyu = m.Dyu;
  s.vx_design = m.vx_design;
  s.structure = m.structure;
  return s;
}

}  // namespace tgcmpc

#endif  // TGCMPC_VEHICLE_MODEL_HPP_
