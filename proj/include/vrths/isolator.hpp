#pragma once

#include <cmath>

#include "vrths/degradation.hpp"
#include "vrths/errors.hpp"

namespace vrths {

// Smooth differential hysteresis model of the rubber isolator. Restoring
// force R = k*x + alpha*z with the hysteretic displacement z driven by
//   zdot = A_bw*xdot - beta*|xdot|*|z|^(n-1)*z - gamma*xdot*|z|^n.
// For beta >= |gamma| the hysteretic state is trapped in
// |z| <= z_u = (A_bw/(beta+gamma))^(1/n).
struct BoucWenIsolator {
  double k = 4.60e4;     // N/m, elastic stiffness (post-degradation)
  double alpha = 1.15e4; // N/m, hysteretic stiffness
  double A_bw = 1.0;
  double beta = 50.0;    // m^-n
  double gamma = 50.0;   // m^-n
  double n = 1.0;
  double z = 0.0;        // m, hysteretic displacement state

  void validate() const {
    if (!(k > 0.0)) throw ConfigError("isolator: k must be > 0");
    if (!(beta + gamma > 0.0)) throw ConfigError("isolator: beta + gamma must be > 0");
    if (!(beta >= std::abs(gamma)))
      throw ConfigError("isolator: beta >= |gamma| required for bounded z");
    if (!(n >= 1.0)) throw ConfigError("isolator: exponent n must be >= 1");
    if (!(std::abs(z) <= ultimate_z() * (1.0 + 1e-12)))
      throw ConfigError("isolator: initial |z| exceeds the ultimate bound");
  }

  double ultimate_z() const { return std::pow(A_bw / (beta + gamma), 1.0 / n); }
};

// Evolution rate of the hysteretic displacement for a given z (stateless form
// used inside integrator stages).
inline double bouc_wen_rate(const BoucWenIsolator& iso, double x_dot, double z) {
  const double az = std::abs(z);
  const double zn1 = iso.n == 1.0 ? 1.0 : std::pow(az, iso.n - 1.0);
  const double zn = zn1 * az;
  return iso.A_bw * x_dot - iso.beta * std::abs(x_dot) * zn1 * z -
         iso.gamma * x_dot * zn;
}

inline double bouc_wen_rate(const BoucWenIsolator& iso, double x_dot) {
  return bouc_wen_rate(iso, x_dot, iso.z);
}

inline double restoring_force(const BoucWenIsolator& iso, double x) {
  return iso.k * x + iso.alpha * iso.z;
}

inline double restoring_force(const BoucWenIsolator& iso, double x, double z) {
  return iso.k * x + iso.alpha * z;
}

// Exchanges the elastic stiffness for its value after T days of accelerated
// exposure; the hysteretic parameters are untouched.
inline BoucWenIsolator apply_degradation(const BoucWenIsolator& iso,
                                         const DegradationModel& deg,
                                         double days) {
  BoucWenIsolator out = iso;
  out.k = stiffness_at(deg, days);
  return out;
}

}  // namespace vrths
