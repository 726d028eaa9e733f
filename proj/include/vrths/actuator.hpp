#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "vrths/errors.hpp"

namespace vrths {

// Servo-hydraulic actuator with the moving plate attached, reduced to a
// third-order linear map from commanded displacement to realized plate
// displacement x_m:
//   x_m''' + a2 x_m'' + a1 x_m' + a0 x_m = b0 * command - c_f * F_reaction.
// b0 = a0 gives unit DC gain. c_f (m / (N s^3)) couples the specimen's
// reaction force back into the actuator dynamics; the shipped default is a
// pure displacement device (c_f = 0).
struct ActuatorModel {
  double a2 = 0.0;  // 1/s
  double a1 = 0.0;  // 1/s^2
  double a0 = 0.0;  // 1/s^3
  double b0 = 0.0;  // 1/s^3
  double c_f = 0.0; // m/(N s^3)
  Eigen::Vector3d state = Eigen::Vector3d::Zero();  // [x_m, x_m', x_m'']

  void validate() const {
    // Routh-Hurwitz for s^3 + a2 s^2 + a1 s + a0.
    if (!(a2 > 0.0 && a1 > 0.0 && a0 > 0.0 && a2 * a1 > a0))
      throw ConfigError("actuator: characteristic polynomial is not Hurwitz");
    if (std::abs(b0 / a0 - 1.0) > 1e-9)
      throw ConfigError("actuator: DC gain b0/a0 must equal 1");
  }

  double dominant_pole_bound() const {
    // Cauchy bound on the characteristic roots.
    return 1.0 + std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
  }

  // Pole placement: complex pair (damping, natural frequency = bandwidth) plus
  // a faster real pole.
  static ActuatorModel place_poles(double bandwidth_hz, double damping,
                                   double real_pole_hz, double c_f = 0.0) {
    const double wn = 2.0 * std::numbers::pi * bandwidth_hz;
    const double wr = 2.0 * std::numbers::pi * real_pole_hz;
    ActuatorModel act;
    act.a2 = 2.0 * damping * wn + wr;
    act.a1 = wn * wn + 2.0 * damping * wn * wr;
    act.a0 = wn * wn * wr;
    act.b0 = act.a0;
    act.c_f = c_f;
    return act;
  }
};

namespace detail {

inline Eigen::Vector3d actuator_deriv(const ActuatorModel& act,
                                      const Eigen::Vector3d& s, double command,
                                      double reaction_force) {
  return {s(1), s(2),
          -act.a2 * s(2) - act.a1 * s(1) - act.a0 * s(0) + act.b0 * command -
              act.c_f * reaction_force};
}

}  // namespace detail

// Advances the actuator one step of classical Runge-Kutta with the command
// and reaction force held over the step. Returns the plate displacement.
inline double actuator_step(ActuatorModel& act, double command,
                            double reaction_force, double dt) {
  if (!std::isfinite(command) || !std::isfinite(reaction_force))
    throw InstabilityError("actuator: non-finite input signal");
  if (!(dt > 0.0)) throw ConfigError("actuator: dt must be > 0");

  const Eigen::Vector3d k1 = detail::actuator_deriv(act, act.state, command, reaction_force);
  const Eigen::Vector3d k2 =
      detail::actuator_deriv(act, act.state + 0.5 * dt * k1, command, reaction_force);
  const Eigen::Vector3d k3 =
      detail::actuator_deriv(act, act.state + 0.5 * dt * k2, command, reaction_force);
  const Eigen::Vector3d k4 =
      detail::actuator_deriv(act, act.state + dt * k3, command, reaction_force);
  act.state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return act.state(0);
}

}  // namespace vrths
