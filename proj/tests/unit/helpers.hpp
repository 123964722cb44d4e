#pragma once

#include <random>

#include "quadtail/dynamics/dynamics.hpp"

namespace quadtail::testing {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline UnitQuaternion random_orientation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitQuaternion(n(rng), n(rng), n(rng), n(rng));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random pose and twist with joints inside their limits.
inline SimState random_state(const KinematicTree& tree, std::mt19937_64& rng, double speed = 1.0) {
  SimState s = SimState::zeros(tree.num_joints());
  for (int i = 0; i < 3; ++i) {
    s.base_position[i] = uniform(rng, -1.0, 1.0);
    s.base_linear_velocity[i] = speed * uniform(rng, -1.0, 1.0);
    s.base_angular_velocity[i] = speed * uniform(rng, -1.0, 1.0);
  }
  s.base_orientation = random_orientation(rng);
  for (int j = 0; j < tree.num_joints(); ++j) {
    const Link& l = tree.link(j + 1);
    s.joint_positions[j] = uniform(rng, l.lower_limit, l.upper_limit);
    s.joint_velocities[j] = speed * uniform(rng, -2.0, 2.0);
  }
  return s;
}

}  // namespace quadtail::testing

namespace quadtail::testing {

/// Configuration advanced along generalized velocity `u` for time `h`
/// (world-frame base rate), with generalized velocity `u_new`.
inline SimState advance(const SimState& s, const VecX& u, double h, const VecX& u_new) {
  SimState out = s;
  out.base_position += h * u.segment<3>(0);
  const Vec3 rot = h * u.segment<3>(3);
  Mat3 r = s.base_orientation.rotation_matrix();
  if (rot.norm() > 0.0) r = Eigen::AngleAxisd(rot.norm(), rot.normalized()).toRotationMatrix() * r;
  out.base_orientation = UnitQuaternion::from_rotation_matrix(r);
  out.joint_positions += h * u.tail(s.joint_positions.size());
  set_generalized_velocity(out, u_new);
  return out;
}

/// Kinetic energy of generalized velocity `u` at the configuration of `s`,
/// obtained from central differences of forward-kinematics poses:
/// T = sum 1/2 m |c_dot|^2 + 1/2 w^T (R I R^T) w per link.
inline double kinetic_energy_oracle(const KinematicTree& tree, const SimState& s, const VecX& u) {
  const double h = 1e-6;
  const Kinematics k0 = forward_kinematics(tree, s);
  const Kinematics kp = forward_kinematics(tree, advance(s, u, h, u));
  const Kinematics km = forward_kinematics(tree, advance(s, u, -h, u));
  double t = 0.0;
  for (int i = 0; i < tree.num_links(); ++i) {
    const SpatialInertia& in = tree.link(i).inertia;
    const Vec3 cp = kp.links[i].rotation * in.com() + kp.links[i].position;
    const Vec3 cm = km.links[i].rotation * in.com() + km.links[i].position;
    const Vec3 v = (cp - cm) / (2.0 * h);
    const Mat3 rdot = (kp.links[i].rotation - km.links[i].rotation) / (2.0 * h);
    const Mat3 w_hat = rdot * k0.links[i].rotation.transpose();
    const Vec3 w(0.5 * (w_hat(2, 1) - w_hat(1, 2)), 0.5 * (w_hat(0, 2) - w_hat(2, 0)),
                 0.5 * (w_hat(1, 0) - w_hat(0, 1)));
    const Mat3 r = k0.links[i].rotation;
    t += 0.5 * in.mass() * v.squaredNorm() + 0.5 * w.dot(r * in.inertia_com() * r.transpose() * w);
  }
  return t;
}

/// Mass matrix recovered from the energy oracle by polarization.
inline MatX mass_matrix_oracle(const KinematicTree& tree, const SimState& s) {
  const int n = tree.num_dof();
  VecX diag(n);
  MatX m(n, n);
  for (int i = 0; i < n; ++i) {
    diag[i] = kinetic_energy_oracle(tree, s, VecX::Unit(n, i));
    m(i, i) = 2.0 * diag[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double both = kinetic_energy_oracle(tree, s, VecX::Unit(n, i) + VecX::Unit(n, j));
      m(i, j) = m(j, i) = both - diag[i] - diag[j];
    }
  }
  return m;
}

}  // namespace quadtail::testing
