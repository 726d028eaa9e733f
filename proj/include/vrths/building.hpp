#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "vrths/errors.hpp"

namespace vrths {

struct RayleighCoefficients {
  double a0 = 0.0;  // 1/s, mass-proportional
  double a1 = 0.0;  // s, stiffness-proportional
};

// Target modal damping ratios anchored at two modes of the fixed-base
// superstructure (1-based mode indices).
struct ModalDamping {
  std::array<double, 2> ratios{0.02, 0.02};
  std::array<int, 2> modes{1, 3};
};

using DampingSpec = std::variant<RayleighCoefficients, ModalDamping>;

// Lumped-parameter shear building riding on a base slab.
// masses = [m_base, m_1, ..., m_S]; story_stiffnesses[i] is the shear spring
// between level i and level i+1 (the base counts as level 0). The isolator is
// deliberately not part of this model: it couples in through an external
// nodal force at the base.
struct BuildingModel {
  std::vector<double> masses;             // kg
  std::vector<double> story_stiffnesses;  // N/m
  DampingSpec damping = ModalDamping{};
  double story_height = 3.0;    // m, used only for drift ratios
  double total_weight = 2.0e4;  // N, documentation field

  int stories() const { return static_cast<int>(story_stiffnesses.size()); }

  double total_mass() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
  }

  void validate() const {
    if (masses.empty()) throw ConfigError("building: needs at least one mass");
    if (story_stiffnesses.size() + 1 != masses.size())
      throw ConfigError("building: expected one story stiffness per story "
                        "(masses = stories + 1)");
    for (double m : masses)
      if (!(m > 0.0)) throw ConfigError("building: masses must be > 0");
    for (double k : story_stiffnesses)
      if (!(k > 0.0)) throw ConfigError("building: stiffnesses must be > 0");
    if (!(story_height > 0.0))
      throw ConfigError("building: story height must be > 0");
    if (const auto* md = std::get_if<ModalDamping>(&damping)) {
      for (double z : md->ratios)
        if (!(z >= 0.0 && z < 1.0))
          throw ConfigError("building: damping ratios must lie in [0, 1)");
    }
  }

  // Desk-scale default: 2039 kg total (~20 kN weight), stories in the 4-19 Hz
  // band, isolated rigid-body frequency ~0.76 Hz once the nominal isolator is
  // attached.
  static BuildingModel default_model() {
    BuildingModel b;
    b.masses = {600.0, 480.0, 480.0, 479.0};
    b.story_stiffnesses = {2.0e6, 2.0e6, 2.0e6};
    b.damping = ModalDamping{{0.02, 0.02}, {1, 3}};
    b.story_height = 3.0;
    b.total_weight = 2.0e4;
    return b;
  }
};

// First-order form of the partitioned equations of motion. State is
// Z = [X, Xdot] with X the relative displacements; inputs are
// u = [ground acceleration, nodal force at each DOF]. Output rows are the
// relative displacements (first n) followed by the absolute accelerations
// (next n). Nodal forces are applied signed, in the +x direction.
struct StateSpaceModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  std::vector<std::string> dof_labels;

  int dofs() const { return static_cast<int>(A.rows()) / 2; }
  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
};

namespace detail {

inline Eigen::MatrixXd chain_mass(const std::vector<double>& masses) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(masses.size()), static_cast<Eigen::Index>(masses.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, i) = masses[static_cast<std::size_t>(i)];
  return M;
}

// Shear-chain stiffness. grounded_first: the first spring connects DOF 0 to
// the ground instead of to a preceding DOF (fixed-base assembly).
inline Eigen::MatrixXd chain_stiffness(const std::vector<double>& springs,
                                       Eigen::Index ndof, bool grounded_first) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ndof, ndof);
  for (std::size_t s = 0; s < springs.size(); ++s) {
    const double k = springs[s];
    if (grounded_first) {
      const Eigen::Index j = static_cast<Eigen::Index>(s);
      K(j, j) += k;
      if (j > 0) {
        K(j - 1, j - 1) += k;
        K(j, j - 1) -= k;
        K(j - 1, j) -= k;
      }
    } else {
      const Eigen::Index i = static_cast<Eigen::Index>(s);
      K(i, i) += k;
      K(i + 1, i + 1) += k;
      K(i, i + 1) -= k;
      K(i + 1, i) -= k;
    }
  }
  return K;
}

inline StateSpaceModel first_order_form(const Eigen::MatrixXd& M,
                                        const Eigen::MatrixXd& K,
                                        const Eigen::MatrixXd& Cd,
                                        std::vector<std::string> labels) {
  const Eigen::Index n = M.rows();
  Eigen::VectorXd minv(n);
  for (Eigen::Index i = 0; i < n; ++i) minv(i) = 1.0 / M(i, i);

  StateSpaceModel ss;
  ss.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ss.A.topRightCorner(n, n).setIdentity();
  ss.A.bottomLeftCorner(n, n) = -(minv.asDiagonal() * K);
  ss.A.bottomRightCorner(n, n) = -(minv.asDiagonal() * Cd);

  ss.B = Eigen::MatrixXd::Zero(2 * n, 1 + n);
  ss.B.col(0).tail(n).setConstant(-1.0);  // ground acceleration hits every mass
  for (Eigen::Index i = 0; i < n; ++i) ss.B(n + i, 1 + i) = minv(i);

  ss.C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ss.C.topLeftCorner(n, n).setIdentity();
  ss.C.bottomLeftCorner(n, n) = ss.A.bottomLeftCorner(n, n);
  ss.C.bottomRightCorner(n, n) = ss.A.bottomRightCorner(n, n);

  // Absolute acceleration = relative acceleration + ground acceleration, so
  // the ground column of D cancels to zero and only nodal forces feed through.
  ss.D = Eigen::MatrixXd::Zero(2 * n, 1 + n);
  for (Eigen::Index i = 0; i < n; ++i) ss.D(n + i, 1 + i) = minv(i);

  ss.dof_labels = std::move(labels);
  return ss;
}

}  // namespace detail

// Undamped natural frequencies (rad/s, ascending) of the fixed-base
// superstructure; these are the anchor modes for Rayleigh damping.
inline std::vector<double> fixed_base_frequencies(const BuildingModel& model) {
  model.validate();
  if (model.stories() < 1)
    throw ConfigError("building: fixed-base frequencies need at least one story");
  const std::vector<double> sup_masses(model.masses.begin() + 1, model.masses.end());
  const Eigen::MatrixXd M = detail::chain_mass(sup_masses);
  const Eigen::MatrixXd K = detail::chain_stiffness(
      model.story_stiffnesses, static_cast<Eigen::Index>(sup_masses.size()), true);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success)
    throw NumericError("building: generalized eigenvalue solve failed");
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    w.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  return w;
}

// Solves zeta_i = a0/(2 w_i) + a1 w_i / 2 exactly at the two anchor modes
// (1-based indices into the fixed-base spectrum).
inline RayleighCoefficients rayleigh_coefficients(const BuildingModel& model,
                                                  std::array<double, 2> ratios,
                                                  std::array<int, 2> modes) {
  for (double z : ratios)
    if (!(z > 0.0 && z < 1.0))
      throw ConfigError("rayleigh: damping ratios must lie in (0, 1)");
  const std::vector<double> freqs = fixed_base_frequencies(model);
  for (int m : modes)
    if (m < 1 || m > static_cast<int>(freqs.size()))
      throw ConfigError("rayleigh: damping spec references nonexistent mode " +
                        std::to_string(m));
  const double wi = freqs[static_cast<std::size_t>(modes[0] - 1)];
  const double wj = freqs[static_cast<std::size_t>(modes[1] - 1)];
  if (std::abs(wi - wj) <= 1e-9 * std::max(wi, wj))
    throw NumericError("rayleigh: anchor modes share a natural frequency; "
                       "system is singular");
  // [1/(2wi) wi/2; 1/(2wj) wj/2] [a0; a1] = [zi; zj]
  const double det = (wj * wj - wi * wi) / (4.0 * wi * wj);
  RayleighCoefficients rc;
  rc.a0 = (ratios[0] * wj / 2.0 - ratios[1] * wi / 2.0) / det;
  rc.a1 = (ratios[1] / (2.0 * wi) - ratios[0] / (2.0 * wj)) / det;
  return rc;
}

// Modal damping ratio implied by a Rayleigh pair at frequency w.
inline double rayleigh_ratio_at(const RayleighCoefficients& rc, double w) {
  return rc.a0 / (2.0 * w) + rc.a1 * w / 2.0;
}

inline RayleighCoefficients resolve_damping(const BuildingModel& model) {
  if (const auto* rc = std::get_if<RayleighCoefficients>(&model.damping)) return *rc;
  const auto& md = std::get<ModalDamping>(model.damping);
  return rayleigh_coefficients(model, md.ratios, md.modes);
}

// Base-isolated assembly: all masses free, no grounding spring at the base,
// isolator force enters through the nodal-force input at the base row.
inline StateSpaceModel assemble_isolated(const BuildingModel& model) {
  model.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(model.masses.size());
  const Eigen::MatrixXd M = detail::chain_mass(model.masses);
  const Eigen::MatrixXd K = detail::chain_stiffness(model.story_stiffnesses, n, false);
  const RayleighCoefficients rc = resolve_damping(model);
  const Eigen::MatrixXd Cd = rc.a0 * M + rc.a1 * K;

  std::vector<std::string> labels{"x_b"};
  for (int s = 1; s <= model.stories(); ++s) labels.push_back("x_" + std::to_string(s));
  return detail::first_order_form(M, K, Cd, std::move(labels));
}

// Fixed-base comparison variant: the base DOF is removed and story 1 is
// grounded through its story spring.
inline StateSpaceModel assemble_fixed_base(const BuildingModel& model) {
  model.validate();
  if (model.stories() < 1)
    throw ConfigError("building: fixed-base assembly needs at least one story");
  const std::vector<double> sup_masses(model.masses.begin() + 1, model.masses.end());
  const Eigen::Index n = static_cast<Eigen::Index>(sup_masses.size());
  const Eigen::MatrixXd M = detail::chain_mass(sup_masses);
  const Eigen::MatrixXd K = detail::chain_stiffness(model.story_stiffnesses, n, true);
  const RayleighCoefficients rc = resolve_damping(model);
  const Eigen::MatrixXd Cd = rc.a0 * M + rc.a1 * K;

  std::vector<std::string> labels;
  for (int s = 1; s <= model.stories(); ++s) labels.push_back("x_" + std::to_string(s));
  return detail::first_order_form(M, K, Cd, std::move(labels));
}

// Folds a linear spring between the base DOF and the ground into the system
// matrices. Used by the monolithic reference and by the input-output
// equivalence checks against external force injection.
inline StateSpaceModel with_linear_base_spring(const StateSpaceModel& ss, double k) {
  StateSpaceModel out = ss;
  out.A.col(0) -= k * ss.B.col(1);
  out.C.col(0) -= k * ss.D.col(1);
  return out;
}

}  // namespace vrths
