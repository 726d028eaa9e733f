#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <thread>
#include <vector>

#include "vrths/actuator.hpp"
#include "vrths/building.hpp"
#include "vrths/controller.hpp"
#include "vrths/errors.hpp"
#include "vrths/ground_motion.hpp"
#include "vrths/isolator.hpp"
#include "vrths/load_cell.hpp"
#include "vrths/rng.hpp"

namespace vrths {

enum class IntegrationScheme { rk4 };

// coupled: full loop with actuator dynamics, load-cell sensing, inertia
//   compensation and the configured exchange delay.
// ideal: perfect transfer system; the isolator force is evaluated inside the
//   integrator stages (synchronous coupling, no delay, exact sensing). This
//   is the limit the monolithic reference must match.
enum class PlantMode { coupled, ideal };

// Plate-acceleration source for the inertia compensation.
enum class AccelEstimate { second_difference, oracle };

struct EngineConfig {
  double dt = 1.0 / 1024.0;
  IntegrationScheme scheme = IntegrationScheme::rk4;
  int exchange_delay_steps = 1;
  PlantMode plant_mode = PlantMode::coupled;
  AccelEstimate accel_estimate = AccelEstimate::second_difference;
  double instability_limit = 1.0e6;
  bool pace_realtime = false;  // wall-clock pacing, demonstration only

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("engine: dt must be > 0");
    if (exchange_delay_steps < 1)
      throw ConfigError("engine: exchange_delay_steps must be >= 1");
    if (!(instability_limit > 0.0))
      throw ConfigError("engine: instability limit must be > 0");
  }
};

struct RecordMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  double exposure_days = 0.0;
  std::string motion_label;
};

// Synchronized channel histories from one run. Index i is time i*dt; row 0 is
// the (zero) initial condition.
struct SimulationRecord {
  double dt = 0.0;
  std::vector<std::string> dof_labels;
  std::vector<double> time;
  std::vector<std::vector<double>> rel_disp;    // [dof][i], m, relative to ground
  std::vector<std::vector<double>> abs_accel;   // [dof][i], m/s^2, absolute
  std::vector<double> ground_accel;             // m/s^2
  std::vector<double> command;                  // x_b sent to the transfer system, m
  std::vector<double> measured;                 // x_m realized, m
  std::vector<double> force_true;               // R, N
  std::vector<double> force_estimate;           // R-hat, N
  std::vector<double> force_load_cell;          // F_lc, N
  std::vector<double> force_applied;            // base force injected during the step ending at i, N
  std::vector<double> tracking_error;           // e = x_b - x_m, m
  RecordMeta meta;

  std::size_t size() const { return time.size(); }
};

// The emulated physical substructure: isolator specimen on the moving plate,
// driven by the actuator, sensed by the load cell.
struct PlantAssembly {
  BoucWenIsolator isolator{};
  ActuatorModel actuator{};
  LoadCellModel load_cell{};

  void validate() const {
    isolator.validate();
    actuator.validate();
    load_cell.validate();
  }
};

namespace detail {

// RK4 for Zdot = A Z + b_g * ag(t) + b_f * f with the base force held over
// the step and the ground acceleration interpolated at the stage times.
class StructureStepper {
 public:
  StructureStepper(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
      : A_(A), bg_(B.col(0)), bf_(B.col(1)) {
    const auto n = A.rows();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
  }

  void step(Eigen::VectorXd& Z, double dt, double ag0, double ag_mid, double ag1,
            double base_force) {
    deriv(k1_, Z, ag0, base_force);
    tmp_ = Z + (0.5 * dt) * k1_;
    deriv(k2_, tmp_, ag_mid, base_force);
    tmp_ = Z + (0.5 * dt) * k2_;
    deriv(k3_, tmp_, ag_mid, base_force);
    tmp_ = Z + dt * k3_;
    deriv(k4_, tmp_, ag1, base_force);
    Z += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  void deriv(Eigen::VectorXd& out, const Eigen::VectorXd& Z, double ag, double f) {
    out.noalias() = A_ * Z;
    out.noalias() += bg_ * ag;
    out.noalias() += bf_ * f;
  }

  const Eigen::MatrixXd& A_;
  Eigen::VectorXd bg_, bf_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

// Joint actuator + hysteresis state [x_m, x_m', x_m'', z] advanced with the
// command held over the step; the reaction force is re-evaluated per stage.
inline Eigen::Vector4d plant_deriv(const ActuatorModel& act,
                                   const BoucWenIsolator& iso,
                                   double plate_mass,
                                   const Eigen::Vector4d& s, double command) {
  const double restoring = iso.k * s(0) + iso.alpha * s(3);
  const double reaction = restoring + plate_mass * s(2);
  Eigen::Vector4d d;
  d(0) = s(1);
  d(1) = s(2);
  d(2) = -act.a2 * s(2) - act.a1 * s(1) - act.a0 * s(0) + act.b0 * command -
         act.c_f * reaction;
  d(3) = bouc_wen_rate(iso, s(1), s(3));
  return d;
}

inline void plant_step(const ActuatorModel& act, const BoucWenIsolator& iso,
                       double plate_mass, Eigen::Vector4d& s, double command,
                       double dt) {
  const Eigen::Vector4d k1 = plant_deriv(act, iso, plate_mass, s, command);
  const Eigen::Vector4d k2 =
      plant_deriv(act, iso, plate_mass, s + 0.5 * dt * k1, command);
  const Eigen::Vector4d k3 =
      plant_deriv(act, iso, plate_mass, s + 0.5 * dt * k2, command);
  const Eigen::Vector4d k4 = plant_deriv(act, iso, plate_mass, s + dt * k3, command);
  s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void reserve_record(SimulationRecord& rec, const StateSpaceModel& ss,
                           std::size_t rows, double dt, const RecordMeta& meta,
                           const std::string& motion_label) {
  rec.dt = dt;
  rec.dof_labels = ss.dof_labels;
  rec.meta = meta;
  if (rec.meta.motion_label.empty()) rec.meta.motion_label = motion_label;
  rec.time.reserve(rows);
  rec.rel_disp.assign(ss.dof_labels.size(), {});
  rec.abs_accel.assign(ss.dof_labels.size(), {});
  for (auto& v : rec.rel_disp) v.reserve(rows);
  for (auto& v : rec.abs_accel) v.reserve(rows);
  for (auto* v : {&rec.ground_accel, &rec.command, &rec.measured, &rec.force_true,
                  &rec.force_estimate, &rec.force_load_cell, &rec.force_applied,
                  &rec.tracking_error})
    v->reserve(rows);
}

inline void check_finite_bounded(double value, double limit, const char* channel,
                                 double t) {
  if (!std::isfinite(value) || std::abs(value) > limit)
    throw InstabilityError("simulation diverged: channel " + std::string(channel) +
                           " at t = " + std::to_string(t) + " s");
}

}  // namespace detail

// One coupled RTHS experiment. Per step: the numerical substructure advances
// one dt driven by the ground acceleration and the latest delayed force
// estimate; the new base displacement is commanded to the transfer system;
// the controller, actuator, isolator and load cell respond; the new force
// estimate enters the numerical side exchange_delay_steps later.
// Deterministic for a fixed (configuration, seed).
inline SimulationRecord run_rths(const StateSpaceModel& structure,
                                 const PlantAssembly& plant,
                                 const ControllerConfig& controller_cfg,
                                 const GroundMotion& motion,
                                 const EngineConfig& cfg,
                                 RecordMeta meta = {}) {
  cfg.validate();
  plant.validate();
  const GroundMotion grid = resample_motion(motion, cfg.dt);
  const std::size_t steps = grid.samples.size() - 1;
  if (steps == 0) throw ConfigError("run_rths: motion shorter than one step");

  const auto n = static_cast<std::size_t>(structure.dofs());
  const Eigen::MatrixXd Cacc = structure.C.bottomRows(structure.dofs());
  const Eigen::VectorXd Dacc_force = structure.D.col(1).tail(structure.dofs());

  SimulationRecord rec;
  detail::reserve_record(rec, structure, steps + 1, cfg.dt, meta, grid.label);

  Eigen::VectorXd Z = Eigen::VectorXd::Zero(structure.states());
  Eigen::VectorXd u_acc(structure.dofs());
  detail::StructureStepper stepper(structure.A, structure.B);

  const bool ideal = cfg.plant_mode == PlantMode::ideal;
  const BoucWenIsolator& iso = plant.isolator;
  const double dt = cfg.dt;
  const double dt2 = dt * dt;

  // Ideal mode appends the hysteretic state to the structural state and
  // couples the isolator force inside the integrator stages.
  double z_ideal = iso.z;

  Eigen::Vector4d plant_state;
  plant_state << 0.0, 0.0, 0.0, iso.z;
  ControllerConfig ctrl_cfg = controller_cfg;
  ctrl_cfg.sample_dt = cfg.dt;  // the controller runs at the loop rate
  TrackingController controller(ctrl_cfg);
  RandomStream noise(plant.load_cell.seed);

  std::deque<double> force_queue(static_cast<std::size_t>(cfg.exchange_delay_steps), 0.0);
  double xm_prev1 = 0.0, xm_prev2 = 0.0;  // x_m history for the second difference

  const Eigen::Index nv = static_cast<Eigen::Index>(n);
  Eigen::VectorXd S_joint, j1, j2, j3, j4, jtmp;
  if (ideal) {
    S_joint.resize(2 * nv + 1);
    j1.resize(2 * nv + 1);
    j2.resize(2 * nv + 1);
    j3.resize(2 * nv + 1);
    j4.resize(2 * nv + 1);
    jtmp.resize(2 * nv + 1);
  }

  auto emit = [&](double t, double ag, double f_applied, double cmd, double xm,
                  double r_true, double r_hat, double f_lc) {
    rec.time.push_back(t);
    for (std::size_t d = 0; d < n; ++d)
      rec.rel_disp[d].push_back(Z(static_cast<Eigen::Index>(d)));
    u_acc.noalias() = Cacc * Z;
    u_acc.noalias() += Dacc_force * f_applied;
    for (std::size_t d = 0; d < n; ++d)
      rec.abs_accel[d].push_back(u_acc(static_cast<Eigen::Index>(d)));
    rec.ground_accel.push_back(ag);
    rec.command.push_back(cmd);
    rec.measured.push_back(xm);
    rec.force_true.push_back(r_true);
    rec.force_estimate.push_back(r_hat);
    rec.force_load_cell.push_back(f_lc);
    rec.force_applied.push_back(f_applied);
    rec.tracking_error.push_back(cmd - xm);
  };

  emit(0.0, grid.samples[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);

  const auto wall_start = std::chrono::steady_clock::now();

  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = static_cast<double>(k + 1) * dt;
    const double ag0 = grid.samples[k];
    const double ag1 = grid.samples[k + 1];
    const double ag_mid = 0.5 * (ag0 + ag1);

    double f_applied, cmd, xm, r_true, r_hat, f_lc;

    if (ideal) {
      // Structure and hysteretic state integrated jointly; force from the
      // stage states themselves.
      auto joint_deriv = [&](const Eigen::VectorXd& S, double ag,
                             Eigen::VectorXd& out) {
        const double xb = S(0);
        const double vb = S(nv);
        const double z = S(2 * nv);
        const double force = -(iso.k * xb + iso.alpha * z);
        out.head(2 * nv).noalias() = structure.A * S.head(2 * nv);
        out.head(2 * nv).noalias() += structure.B.col(0) * ag;
        out.head(2 * nv).noalias() += structure.B.col(1) * force;
        out(2 * nv) = bouc_wen_rate(iso, vb, z);
      };
      S_joint.head(2 * nv) = Z;
      S_joint(2 * nv) = z_ideal;
      joint_deriv(S_joint, ag0, j1);
      jtmp = S_joint + (0.5 * dt) * j1;
      joint_deriv(jtmp, ag_mid, j2);
      jtmp = S_joint + (0.5 * dt) * j2;
      joint_deriv(jtmp, ag_mid, j3);
      jtmp = S_joint + dt * j3;
      joint_deriv(jtmp, ag1, j4);
      S_joint += (dt / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
      Z = S_joint.head(2 * nv);
      z_ideal = S_joint(2 * nv);

      cmd = Z(0);
      xm = Z(0);
      r_true = iso.k * xm + iso.alpha * z_ideal;
      r_hat = r_true;
      f_lc = r_true;  // exact sensing in the ideal limit
      f_applied = -r_true;
    } else {
      f_applied = -force_queue.front();
      stepper.step(Z, dt, ag0, ag_mid, ag1, f_applied);

      cmd = Z(0);
      const double xm_meas = plant_state(0);  // measurement available at t_k
      const double actuator_cmd = controller.step(cmd, xm_meas);
      detail::plant_step(plant.actuator, iso, plant.load_cell.plate_mass,
                         plant_state, actuator_cmd, dt);

      xm = plant_state(0);
      r_true = iso.k * xm + iso.alpha * plant_state(3);
      const double plate_accel = plant_state(2);
      f_lc = load_cell_reading(plant.load_cell, r_true, plate_accel, noise);
      const double accel_est = cfg.accel_estimate == AccelEstimate::oracle
                                   ? plate_accel
                                   : (xm - 2.0 * xm_prev1 + xm_prev2) / dt2;
      r_hat = estimate_restoring_force(plant.load_cell, f_lc, accel_est);
      xm_prev2 = xm_prev1;
      xm_prev1 = xm;

      force_queue.pop_front();
      force_queue.push_back(r_hat);
    }

    for (std::size_t d = 0; d < n; ++d) {
      detail::check_finite_bounded(Z(static_cast<Eigen::Index>(d)),
                                   cfg.instability_limit,
                                   structure.dof_labels[d].c_str(), t1);
      detail::check_finite_bounded(Z(static_cast<Eigen::Index>(n + d)),
                                   cfg.instability_limit,
                                   (structure.dof_labels[d] + "_dot").c_str(), t1);
    }
    detail::check_finite_bounded(xm, cfg.instability_limit, "x_m", t1);
    detail::check_finite_bounded(r_hat, 1e300, "force_estimate", t1);

    emit(t1, ag1, f_applied, cmd, xm, r_true, r_hat, f_lc);

    if (cfg.pace_realtime)
      std::this_thread::sleep_until(
          wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(t1)));
  }
  return rec;
}

// Verification oracle: the same isolated building with a linear isolator of
// stiffness k folded into the system matrices, integrated as one state-space
// system with no exchange.
inline SimulationRecord run_monolithic_reference(const StateSpaceModel& structure,
                                                 double isolator_k,
                                                 const GroundMotion& motion,
                                                 const EngineConfig& cfg,
                                                 RecordMeta meta = {}) {
  cfg.validate();
  if (!(isolator_k >= 0.0))
    throw ConfigError("monolithic reference: isolator stiffness must be >= 0");
  const GroundMotion grid = resample_motion(motion, cfg.dt);
  const std::size_t steps = grid.samples.size() - 1;
  if (steps == 0)
    throw ConfigError("monolithic reference: motion shorter than one step");

  const StateSpaceModel mono = with_linear_base_spring(structure, isolator_k);
  const auto n = static_cast<std::size_t>(mono.dofs());
  const Eigen::MatrixXd Cacc = mono.C.bottomRows(mono.dofs());

  SimulationRecord rec;
  detail::reserve_record(rec, mono, steps + 1, cfg.dt, meta, grid.label);

  Eigen::VectorXd Z = Eigen::VectorXd::Zero(mono.states());
  Eigen::VectorXd u_acc(mono.dofs());
  detail::StructureStepper stepper(mono.A, mono.B);

  auto emit = [&](double t, double ag) {
    const double xb = Z(0);
    const double r = isolator_k * xb;
    rec.time.push_back(t);
    for (std::size_t d = 0; d < n; ++d)
      rec.rel_disp[d].push_back(Z(static_cast<Eigen::Index>(d)));
    u_acc.noalias() = Cacc * Z;
    for (std::size_t d = 0; d < n; ++d)
      rec.abs_accel[d].push_back(u_acc(static_cast<Eigen::Index>(d)));
    rec.ground_accel.push_back(ag);
    rec.command.push_back(xb);
    rec.measured.push_back(xb);
    rec.force_true.push_back(r);
    rec.force_estimate.push_back(r);
    rec.force_load_cell.push_back(r);
    rec.force_applied.push_back(0.0);
    rec.tracking_error.push_back(0.0);
  };

  emit(0.0, grid.samples[0]);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = static_cast<double>(k + 1) * cfg.dt;
    stepper.step(Z, cfg.dt, grid.samples[k], 0.5 * (grid.samples[k] + grid.samples[k + 1]),
                 grid.samples[k + 1], 0.0);
    for (std::size_t d = 0; d < n; ++d)
      detail::check_finite_bounded(Z(static_cast<Eigen::Index>(d)),
                                   cfg.instability_limit,
                                   mono.dof_labels[d].c_str(), t1);
    emit(t1, grid.samples[k + 1]);
  }
  return rec;
}

}  // namespace vrths
