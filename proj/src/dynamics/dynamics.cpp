#include "quadtail/dynamics/dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "quadtail/common/errors.hpp"
#include "quadtail/math/spatial.hpp"

namespace quadtail {
namespace {

// World-frame kinematic quantities for one configuration.
struct TreeFrames {
  std::vector<Mat3> rotation;
  std::vector<Vec3> position;
  std::vector<Vec6> motion;    // joint motion subspace (links >= 1)
  std::vector<Vec6> velocity;  // spatial velocity about the world origin
  std::vector<Mat6> inertia;   // spatial inertia about the world origin
  Vec3 base_linear = Vec3::Zero();
  Vec3 base_angular = Vec3::Zero();
};

void compute_frames(const KinematicTree& tree, const SimState& state, TreeFrames& f,
                    bool velocities, bool inertias) {
  const int n = tree.num_links();
  f.rotation.resize(n);
  f.position.resize(n);
  f.motion.assign(n, Vec6::Zero());
  if (velocities) f.velocity.resize(n);
  if (inertias) f.inertia.resize(n);

  const auto& links = tree.links();
  f.rotation[0] = state.base_orientation.rotation_matrix();
  f.position[0] = state.base_position;
  if (velocities) {
    f.base_linear = state.base_linear_velocity;
    f.base_angular = f.rotation[0] * state.base_angular_velocity;
    f.velocity[0] = spatial(f.base_angular, f.base_linear - f.base_angular.cross(f.position[0]));
  }
  for (int i = 1; i < n; ++i) {
    const Link& l = links[i];
    const int p = l.parent;
    const double q = state.joint_positions[i - 1];
    const Mat3 joint_frame = f.rotation[p] * l.rotation;
    f.rotation[i] = joint_frame * Eigen::AngleAxisd(q, l.axis).toRotationMatrix();
    f.position[i] = f.position[p] + f.rotation[p] * l.offset;
    const Vec3 axis = joint_frame * l.axis;
    f.motion[i] = spatial(axis, f.position[i].cross(axis));
    if (velocities) f.velocity[i] = f.velocity[p] + f.motion[i] * state.joint_velocities[i - 1];
  }
  if (inertias) {
    for (int i = 0; i < n; ++i) {
      f.inertia[i] = world_spatial_inertia(links[i].inertia, f.rotation[i], f.position[i]);
    }
  }
}

Vec3 frames_center_of_mass(const KinematicTree& tree, const TreeFrames& f) {
  Vec3 weighted = Vec3::Zero();
  double mass = 0.0;
  for (int i = 0; i < tree.num_links(); ++i) {
    const auto& inertia = tree.link(i).inertia;
    weighted += inertia.mass() * (f.rotation[i] * inertia.com() + f.position[i]);
    mass += inertia.mass();
  }
  return weighted / mass;
}

// S_base^T f for the base columns [v, w].
Vec6 base_generalized_force(const Vec6& force, const Vec3& base_position) {
  Vec6 out;
  out.head<3>() = linear(force);
  out.tail<3>() = angular(force) - base_position.cross(linear(force));
  return out;
}

// S_base * u_base.
Vec6 base_motion(const Vec3& v, const Vec3& w, const Vec3& base_position) {
  return spatial(w, v - w.cross(base_position));
}

VecX rnea(const KinematicTree& tree, const TreeFrames& f, const SimState& state, const VecX& acc,
          const Vec3& gravity, const std::vector<Vec6>& external) {
  const int n = tree.num_links();
  const auto& links = tree.links();
  std::vector<Vec6> a(n), force(n);

  const Vec3 p0 = f.position[0];
  const Vec3 v0 = f.base_linear;
  const Vec3 w0 = f.base_angular;
  const Vec3 dv = acc.segment<3>(0);
  const Vec3 dw = acc.segment<3>(3);
  a[0] = spatial(dw, dv - dw.cross(p0) - w0.cross(v0)) + spatial(Vec3::Zero(), -gravity);

  for (int i = 1; i < n; ++i) {
    const double qd = state.joint_velocities[i - 1];
    a[i] = a[links[i].parent] + f.motion[i] * acc[5 + i] +
           cross_motion(f.velocity[i], f.motion[i]) * qd;
  }
  for (int i = 0; i < n; ++i) {
    force[i] = f.inertia[i] * a[i] + cross_force(f.velocity[i], f.inertia[i] * f.velocity[i]);
    if (!external.empty()) force[i] -= external[i];
  }

  VecX tau(tree.num_dof());
  for (int i = n - 1; i >= 1; --i) {
    tau[5 + i] = f.motion[i].dot(force[i]);
    force[links[i].parent] += force[i];
  }
  tau.head<6>() = base_generalized_force(force[0], p0);
  return tau;
}

MatX crba(const KinematicTree& tree, const TreeFrames& f) {
  const int n = tree.num_links();
  const int nv = tree.num_dof();
  const auto& links = tree.links();
  std::vector<Mat6> composite = f.inertia;
  for (int i = n - 1; i >= 1; --i) composite[links[i].parent] += composite[i];

  MatX m = MatX::Zero(nv, nv);
  const Vec3 p0 = f.position[0];
  for (int i = 1; i < n; ++i) {
    const Vec6 force = composite[i] * f.motion[i];
    const int ci = 5 + i;
    m(ci, ci) = f.motion[i].dot(force);
    for (int j = links[i].parent; j > 0; j = links[j].parent) {
      const double value = f.motion[j].dot(force);
      m(5 + j, ci) = value;
      m(ci, 5 + j) = value;
    }
    const Vec6 base = base_generalized_force(force, p0);
    m.block<6, 1>(0, ci) = base;
    m.block<1, 6>(ci, 0) = base.transpose();
  }
  for (int c = 0; c < 6; ++c) {
    const Vec3 v = c < 3 ? Vec3(Vec3::Unit(c)) : Vec3(Vec3::Zero());
    const Vec3 w = c < 3 ? Vec3(Vec3::Zero()) : Vec3(Vec3::Unit(c - 3));
    m.block<6, 1>(0, c) = base_generalized_force(composite[0] * base_motion(v, w, p0), p0);
  }
  return 0.5 * (m + m.transpose());
}

std::vector<Vec6> external_spatial(const KinematicTree& tree,
                                   std::span<const ExternalForce> external) {
  std::vector<Vec6> out;
  if (external.empty()) return out;
  out.assign(tree.num_links(), Vec6::Zero());
  for (const auto& e : external) {
    if (e.link < 0 || e.link >= tree.num_links())
      throw PreconditionError("external force references unknown link");
    out[e.link] += force_at_point(e.force, e.point);
  }
  return out;
}

struct FootContact {
  Vec3 position;
  Vec3 velocity;
  Vec3 force = Vec3::Zero();
  double normal_damping = 0.0;      // d(force)/d(velocity) along z
  double tangential_damping = 0.0;  // along x and y
};

FootContact evaluate_contact(const Vec3& p, const Vec3& v, const ContactParams& params) {
  FootContact c{p, v};
  if (p.z() >= 0.0) return c;
  const double normal = std::max(0.0, -params.stiffness * p.z() - params.damping * v.z());
  if (normal <= 0.0) return c;
  c.normal_damping = params.damping;
  const Eigen::Vector2d vt(v.x(), v.y());
  const double denom = std::max(vt.norm(), params.regularization_velocity);
  const double slope = params.friction * normal / denom;
  c.force = Vec3(-slope * vt.x(), -slope * vt.y(), normal);
  c.tangential_damping = slope;
  return c;
}

}  // namespace

SimState SimState::zeros(int num_joints) {
  SimState s;
  s.joint_positions = VecX::Zero(num_joints);
  s.joint_velocities = VecX::Zero(num_joints);
  return s;
}

void ContactParams::validate() const {
  if (!(stiffness > 0.0 && damping > 0.0 && friction > 0.0 && regularization_velocity > 0.0))
    throw PreconditionError("contact parameters must be strictly positive");
}

std::vector<double> Kinematics::foot_heights(const KinematicTree& tree) const {
  std::vector<double> out;
  out.reserve(tree.foot_markers().size());
  for (int m : tree.foot_markers()) out.push_back(markers[m].z());
  return out;
}

void check_dimensions(const KinematicTree& tree, const SimState& state) {
  if (state.joint_positions.size() != tree.num_joints() ||
      state.joint_velocities.size() != tree.num_joints())
    throw PreconditionError("state has " + std::to_string(state.joint_positions.size()) +
                            " joints, tree has " + std::to_string(tree.num_joints()));
}

Kinematics forward_kinematics(const KinematicTree& tree, const SimState& state) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, false, false);
  Kinematics k;
  k.links.resize(tree.num_links());
  for (int i = 0; i < tree.num_links(); ++i) k.links[i] = {f.rotation[i], f.position[i]};
  for (const auto& m : tree.markers()) {
    k.markers.push_back(f.rotation[m.link] * m.position + f.position[m.link]);
  }
  return k;
}

VecX generalized_velocity(const SimState& state) {
  VecX u(6 + state.joint_velocities.size());
  u.segment<3>(0) = state.base_linear_velocity;
  u.segment<3>(3) = state.base_orientation.rotate(state.base_angular_velocity);
  u.tail(state.joint_velocities.size()) = state.joint_velocities;
  return u;
}

void set_generalized_velocity(SimState& state, const VecX& velocity) {
  if (velocity.size() != 6 + state.joint_velocities.size())
    throw PreconditionError("generalized velocity has wrong size");
  state.base_linear_velocity = velocity.segment<3>(0);
  state.base_angular_velocity =
      state.base_orientation.conjugate().rotate(velocity.segment<3>(3));
  state.joint_velocities = velocity.tail(state.joint_velocities.size());
}

MatX mass_matrix(const KinematicTree& tree, const SimState& state) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, false, true);
  return crba(tree, f);
}

VecX bias_forces(const KinematicTree& tree, const SimState& state, const Vec3& gravity,
                 std::span<const ExternalForce> external) {
  return inverse_dynamics(tree, state, VecX::Zero(tree.num_dof()), gravity, external);
}

VecX inverse_dynamics(const KinematicTree& tree, const SimState& state, const VecX& acceleration,
                      const Vec3& gravity, std::span<const ExternalForce> external) {
  check_dimensions(tree, state);
  if (acceleration.size() != tree.num_dof())
    throw PreconditionError("acceleration has wrong size");
  TreeFrames f;
  compute_frames(tree, state, f, true, true);
  return rnea(tree, f, state, acceleration, gravity, external_spatial(tree, external));
}

std::vector<Vec3> contact_forces(const KinematicTree& tree, const SimState& state,
                                 const ContactParams& params) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, true, false);
  std::vector<Vec3> out;
  for (int m : tree.foot_markers()) {
    const Marker& mk = tree.markers()[m];
    const Vec3 p = f.rotation[mk.link] * mk.position + f.position[mk.link];
    out.push_back(evaluate_contact(p, point_velocity(f.velocity[mk.link], p), params).force);
  }
  return out;
}

SimState step(const KinematicTree& tree, const SimState& state, const VecX& joint_torques,
              std::span<const ExternalForce> external, double dt, const StepOptions& options,
              StepDiagnostics* diagnostics) {
  check_dimensions(tree, state);
  if (!(dt > 0.0)) throw PreconditionError("step requires dt > 0");
  if (joint_torques.size() != tree.num_joints())
    throw PreconditionError("torque vector must have one entry per joint");
  const int nv = tree.num_dof();

  TreeFrames f;
  compute_frames(tree, state, f, true, true);
  std::vector<Vec6> fext = external_spatial(tree, external);
  MatX damping = MatX::Zero(nv, nv);
  bool any_damping = false;

  if (diagnostics) {
    diagnostics->foot_forces.assign(tree.foot_markers().size(), Vec3::Zero());
    diagnostics->foot_contact.assign(tree.foot_markers().size(), false);
  }
  // contact Jacobians and damping kept for the momentum balance below
  struct ActiveContact {
    Vec3 point;
    Vec3 force;
    Vec3 damping;
    Eigen::Matrix<double, 3, Eigen::Dynamic> jacobian;
  };
  std::vector<ActiveContact> active;
  if (options.contacts) {
    const auto& feet = tree.foot_markers();
    for (std::size_t k = 0; k < feet.size(); ++k) {
      const Marker& mk = tree.markers()[feet[k]];
      const Vec3 p = f.rotation[mk.link] * mk.position + f.position[mk.link];
      const FootContact c =
          evaluate_contact(p, point_velocity(f.velocity[mk.link], p), options.contact);
      if (diagnostics) {
        diagnostics->foot_forces[k] = c.force;
        diagnostics->foot_contact[k] = c.force.z() > 0.0;
      }
      if (c.force.z() <= 0.0) continue;
      if (fext.empty()) fext.assign(tree.num_links(), Vec6::Zero());
      fext[mk.link] += force_at_point(c.force, p);

      ActiveContact a{p, c.force, Vec3(c.tangential_damping, c.tangential_damping, c.normal_damping),
                      Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, nv)};
      a.jacobian.block<3, 3>(0, 0) = Mat3::Identity();
      a.jacobian.block<3, 3>(0, 3) = -skew(p - f.position[0]);
      for (int l = mk.link; l > 0; l = tree.link(l).parent) {
        a.jacobian.col(5 + l) = point_velocity(f.motion[l], p);
      }
      damping.noalias() += a.jacobian.transpose() * a.damping.asDiagonal() * a.jacobian;
      any_damping = true;
      active.push_back(std::move(a));
    }
  }

  const VecX bias = rnea(tree, f, state, VecX::Zero(nv), options.gravity, fext);
  MatX system = crba(tree, f);
  if (options.implicit_joint_damping.size() == tree.num_joints()) {
    system.diagonal().tail(tree.num_joints()) += dt * options.implicit_joint_damping;
  }
  if (any_damping) system += dt * damping;

  VecX rhs = -bias;
  rhs.tail(tree.num_joints()) += joint_torques;
  const Eigen::LLT<MatX> llt(system);
  if (llt.info() != Eigen::Success) throw RuntimeFault("mass matrix is not positive definite");
  const VecX acc = llt.solve(rhs);

  SimState next = state;
  VecX u = generalized_velocity(state) + dt * acc;
  next.base_linear_velocity = u.segment<3>(0);
  const Vec3 w_body = f.rotation[0].transpose() * u.segment<3>(3);
  next.base_angular_velocity = w_body;
  next.joint_velocities = u.tail(tree.num_joints());
  next.base_position += dt * next.base_linear_velocity;
  next.base_orientation = quat_integrate(state.base_orientation, w_body, dt);
  next.joint_positions += dt * next.joint_velocities;
  next.time += dt;
  if (!options.conserve_momentum) return next;

  // Total spatial momentum about the world origin advances by exactly dt
  // times the external wrench (gravity, effective contact forces, applied
  // forces). The base absorbs the O(dt^2) mismatch: first its position, so
  // the center of mass moves by dt P / m, then its velocity.
  Mat6 composite = Mat6::Zero();
  Vec6 momentum = Vec6::Zero();
  for (int i = 0; i < tree.num_links(); ++i) {
    composite += f.inertia[i];
    momentum += f.inertia[i] * f.velocity[i];
  }
  const double mass = composite(5, 5);
  if (!(mass > 0.0)) return next;
  Vec6 wrench = composite * spatial(Vec3::Zero(), options.gravity);
  for (const Vec6& e : external_spatial(tree, external)) wrench += e;
  const VecX du = u - generalized_velocity(state);
  for (const auto& a : active) {
    const Vec3 effective = a.force - a.damping.cwiseProduct(a.jacobian * du);
    wrench += force_at_point(effective, a.point);
  }
  const Vec6 target = momentum + dt * wrench;
  TreeFrames g;
  compute_frames(tree, next, g, false, false);
  next.base_position += frames_center_of_mass(tree, f) + dt * linear(target) / mass -
                        frames_center_of_mass(tree, g);
  compute_frames(tree, next, g, true, true);
  Mat6 composite_next = Mat6::Zero();
  Vec6 momentum_next = Vec6::Zero();
  for (int i = 0; i < tree.num_links(); ++i) {
    composite_next += g.inertia[i];
    momentum_next += g.inertia[i] * g.velocity[i];
  }
  Mat6 base_map = Mat6::Zero();  // (v, w) -> base spatial velocity
  base_map.block<3, 3>(0, 3) = Mat3::Identity();
  base_map.block<3, 3>(3, 0) = Mat3::Identity();
  base_map.block<3, 3>(3, 3) = skew(next.base_position);
  const Vec6 correction = (composite_next * base_map).partialPivLu().solve(target - momentum_next);
  u.head<6>() += correction;
  next.base_linear_velocity = u.segment<3>(0);
  next.base_angular_velocity = next.base_orientation.conjugate().rotate(u.segment<3>(3));
  return next;
}

Momentum com_momentum(const KinematicTree& tree, const SimState& state) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, true, true);
  Vec6 h = Vec6::Zero();
  for (int i = 0; i < tree.num_links(); ++i) h += f.inertia[i] * f.velocity[i];
  const Vec3 c = frames_center_of_mass(tree, f);
  return {linear(h), angular(h) - c.cross(linear(h))};
}

Vec3 center_of_mass(const KinematicTree& tree, const SimState& state) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, false, false);
  return frames_center_of_mass(tree, f);
}

double kinetic_energy(const KinematicTree& tree, const SimState& state) {
  check_dimensions(tree, state);
  TreeFrames f;
  compute_frames(tree, state, f, true, true);
  double t = 0.0;
  for (int i = 0; i < tree.num_links(); ++i) {
    t += 0.5 * f.velocity[i].dot(f.inertia[i] * f.velocity[i]);
  }
  return t;
}

double potential_energy(const KinematicTree& tree, const SimState& state, const Vec3& gravity) {
  const Kinematics k = forward_kinematics(tree, state);
  double v = 0.0;
  for (int i = 0; i < tree.num_links(); ++i) {
    const auto& inertia = tree.link(i).inertia;
    v -= inertia.mass() * gravity.dot(k.links[i].rotation * inertia.com() + k.links[i].position);
  }
  return v;
}

bool body_ground_contact(const KinematicTree& tree, const SimState& state,
                         const Kinematics& kinematics) {
  const Vec3 half = 0.5 * tree.base_box();
  const Mat3 r = state.base_orientation.rotation_matrix();
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 local((corner & 1) ? half.x() : -half.x(), (corner & 2) ? half.y() : -half.y(),
                     (corner & 4) ? half.z() : -half.z());
    if ((r * local + state.base_position).z() <= 0.0) return true;
  }
  for (std::size_t m = 0; m < tree.markers().size(); ++m) {
    if (tree.markers()[m].kind == MarkerKind::kFoot) continue;
    if (kinematics.markers[m].z() <= 0.0) return true;
  }
  return false;
}

}  // namespace quadtail
