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

#ifndef TGCMPC_TIRE_HPP_
#define TGCMPC_TIRE_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>

namespace tgcmpc {

/// Brush ("Fiala") tire parameters.
struct TireParams {
  double C;     ///< cornering stiffness [N/rad]
  double mu;    ///< static friction coefficient [-]
  double R_mu;  ///< dynamic/static friction ratio [-]
  double Fz;    ///< normal load [N]
};

/// Derived brush-model coefficients, peak-force data and the cone bounds
/// used by the norm-bounded uncertain tire relaxation.
struct TireDerived {
  TireParams params;

  double q;       ///< (1 - (2/3) R_mu)^-1
  double k_mu;    ///< q - ((2 - R_mu)/3 - 1/9) q^2
  double a_coef;  ///< cubic branch: a f + b |f| f + c f^3, f = tan(alpha)
  double b_coef;
  double c_coef;
  double alpha_sat;   ///< saturation slip angle [rad]
  double F_sliding;   ///< sliding force magnitude term (negative) [N]
  double alpha_peak;  ///< slip angle of peak lateral force [rad]
  double F_peak;      ///< peak lateral force magnitude mu*Fz [N]
  double C_peak;      ///< secant stiffness at the peak, mu*Fz/alpha_peak [N/rad]
  double C_bar;       ///< (C + C_peak)/2 [N/rad]
  double dC;          ///< (C - C_peak)/2 [N/rad]
};

/// Derives all brush-model coefficients from the tire parameters.
///
/// By default alpha_peak follows the arctan closed form and C_peak is the
/// exact peak secant mu*Fz/alpha_peak. Published data sheets sometimes pin
/// alpha_peak/C_peak pairs that differ from the closed form; both can be
/// overridden so a configuration can be reproduced verbatim.
inline TireDerived derive_tire(const TireParams& p,
                               std::optional<double> alpha_peak_override = std::nullopt,
                               std::optional<double> C_peak_override = std::nullopt) {
  if (!(p.C > 0.0)) throw std::invalid_argument("tire: C must be positive");
  if (!(p.Fz > 0.0)) throw std::invalid_argument("tire: Fz must be positive");
  if (!(p.mu > 0.0 && p.mu <= 2.0)) throw std::invalid_argument("tire: mu out of (0, 2]");
  if (!(p.R_mu > 0.0 && p.R_mu <= 1.0)) throw std::invalid_argument("tire: R_mu out of (0, 1]");

  TireDerived d;
  d.params = p;
  d.q = 1.0 / (1.0 - (2.0 / 3.0) * p.R_mu);
  d.k_mu = d.q - ((2.0 - p.R_mu) / 3.0 - 1.0 / 9.0) * d.q * d.q;

  const double muFz = p.mu * p.Fz;
  d.a_coef = -p.C;
  d.b_coef = d.k_mu * p.C * p.C * (2.0 - p.R_mu) / (3.0 * muFz);
  d.c_coef = -d.k_mu * d.k_mu * p.C * p.C * p.C * (1.0 - (2.0 / 3.0) * p.R_mu) /
             ((3.0 * muFz) * (3.0 * muFz));
  d.alpha_sat = std::atan(3.0 * muFz / (d.k_mu * p.C));
  d.F_sliding = -p.mu * p.R_mu * p.Fz;

  d.F_peak = muFz;
  d.alpha_peak = alpha_peak_override ? *alpha_peak_override
                                     : std::atan(d.q * muFz / (d.k_mu * p.C));
  d.C_peak = C_peak_override ? *C_peak_override : muFz / d.alpha_peak;

  if (!(d.C_peak > 0.0 && d.C_peak < p.C))
    throw std::invalid_argument("tire: C_peak must lie in (0, C)");
  if (!(d.alpha_peak > 0.0 && d.alpha_peak <= d.alpha_sat))
    throw std::invalid_argument("tire: alpha_peak must lie in (0, alpha_sat]");

  d.C_bar = 0.5 * (p.C + d.C_peak);
  d.dC = 0.5 * (p.C - d.C_peak);
  return d;
}

/// Peak secant stiffness approximation k_mu*C/q (friction independent).
inline double peak_stiffness_approx(const TireDerived& d) {
  return d.k_mu * d.params.C / d.q;
}

/// Brush-model lateral force. Cubic branch inside |alpha| <= alpha_sat,
/// constant sliding force beyond. Odd in alpha; negative for positive slip.
inline double lateral_force(const TireDerived& d, double alpha) {
  if (std::abs(alpha) <= d.alpha_sat) {
    const double f = std::tan(alpha);
    return d.a_coef * f + d.b_coef * std::abs(f) * f + d.c_coef * f * f * f;
  }
  return d.F_sliding * (alpha > 0.0 ? 1.0 : -1.0);
}

/// Solves F(alpha) = -(C_bar + gamma dC) alpha for gamma.
///
/// On |alpha| <= alpha_peak the result lies in [-1, 1]: the brush force is
/// covered by the cone spanned by the stiffness C (gamma = +1) and the peak
/// secant C_peak (gamma = -1).
inline double conic_bound_check(const TireDerived& d, double alpha) {
  if (alpha == 0.0)
    throw std::domain_error("tire: gamma undefined at alpha = 0");
  if (std::abs(alpha) > d.alpha_peak)
    throw std::domain_error("tire: |alpha| exceeds alpha_peak");
  const double secant = -lateral_force(d, alpha) / alpha;
  return (secant - d.C_bar) / d.dC;
}

}  // namespace tgcmpc

#endif  // TGCMPC_TIRE_HPP_
