#pragma once

#include <span>
#include <vector>

#include "quadtail/dynamics/kinematic_tree.hpp"
#include "quadtail/math/quaternion.hpp"

namespace quadtail {

/// Floating-base pose/twist plus joint state.
struct SimState {
  Vec3 base_position = Vec3::Zero();
  UnitQuaternion base_orientation;
  Vec3 base_linear_velocity = Vec3::Zero();   // world frame
  Vec3 base_angular_velocity = Vec3::Zero();  // body frame
  VecX joint_positions;
  VecX joint_velocities;
  double time = 0.0;

  static SimState zeros(int num_joints);
};

/// Penalty ground contact at point feet on the plane z = 0.
struct ContactParams {
  double stiffness = 5000.0;             // N/m
  double damping = 100.0;                // N s/m
  double friction = 0.8;                 // Coulomb coefficient
  double regularization_velocity = 0.05;  // m/s

  void validate() const;
};

/// Force applied at a world point on a link, world frame.
struct ExternalForce {
  int link = 0;
  Vec3 force = Vec3::Zero();
  Vec3 point = Vec3::Zero();
};

struct StepOptions {
  Vec3 gravity{0.0, 0.0, -9.81};
  ContactParams contact;
  bool contacts = true;
  /// Per-joint viscous coefficients already contained in the supplied
  /// torques; they are additionally treated implicitly for stability.
  /// Empty means none.
  VecX implicit_joint_damping;
  /// Advance the total momentum by exactly dt times the external wrench and
  /// let the base absorb the mismatch. Off gives plain semi-implicit Euler.
  bool conserve_momentum = true;
};

struct StepDiagnostics {
  std::vector<Vec3> foot_forces;  // world frame, one per foot marker
  std::vector<bool> foot_contact;
};

struct LinkPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};

struct Kinematics {
  std::vector<LinkPose> links;
  std::vector<Vec3> markers;  // world positions

  /// World heights of the foot markers, in tree foot order.
  std::vector<double> foot_heights(const KinematicTree& tree) const;
};

struct Momentum {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();  // about the instantaneous center of mass
};

void check_dimensions(const KinematicTree& tree, const SimState& state);

/// World pose of every link and world position of every marker.
Kinematics forward_kinematics(const KinematicTree& tree, const SimState& state);

/// Generalized velocity [v_base world, w_base world, joint rates].
VecX generalized_velocity(const SimState& state);
void set_generalized_velocity(SimState& state, const VecX& velocity);

/// Joint-space inertia matrix (composite rigid body algorithm), size num_dof.
MatX mass_matrix(const KinematicTree& tree, const SimState& state);

/// C(q, qd) qd + g(q) - J^T f_ext via recursive Newton-Euler at zero
/// generalized acceleration.
VecX bias_forces(const KinematicTree& tree, const SimState& state, const Vec3& gravity,
                 std::span<const ExternalForce> external = {});

/// Inverse dynamics: generalized forces producing `acceleration`.
VecX inverse_dynamics(const KinematicTree& tree, const SimState& state, const VecX& acceleration,
                      const Vec3& gravity, std::span<const ExternalForce> external = {});

/// Penalty contact force at every foot marker, world frame. Zero when the
/// foot is above the ground.
std::vector<Vec3> contact_forces(const KinematicTree& tree, const SimState& state,
                                 const ContactParams& params);

/// Semi-implicit Euler step: solves M qdd = tau + J^T f_contact + external -
/// bias, updates velocities first and positions with the new velocities.
/// Contact and joint damping enter linearly implicitly. See
/// StepOptions::conserve_momentum for the base momentum correction.
SimState step(const KinematicTree& tree, const SimState& state, const VecX& joint_torques,
              std::span<const ExternalForce> external, double dt,
              const StepOptions& options = {}, StepDiagnostics* diagnostics = nullptr);

Momentum com_momentum(const KinematicTree& tree, const SimState& state);
Vec3 center_of_mass(const KinematicTree& tree, const SimState& state);
double kinetic_energy(const KinematicTree& tree, const SimState& state);
double potential_energy(const KinematicTree& tree, const SimState& state, const Vec3& gravity);

/// True when any corner of the base box or any collision/tail-tip marker is
/// at or below the ground plane.
bool body_ground_contact(const KinematicTree& tree, const SimState& state,
                         const Kinematics& kinematics);

}  // namespace quadtail
