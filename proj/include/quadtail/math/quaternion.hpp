#pragma once

#include <Eigen/Geometry>

#include "quadtail/math/types.hpp"

namespace quadtail {

/// Unit quaternion (w, x, y, z) kept normalized with w >= 0.
class UnitQuaternion {
 public:
  UnitQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}

  /// Normalizes the given coefficients; throws PreconditionError on a zero
  /// or non-finite quaternion.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
  static UnitQuaternion from_rotation_matrix(const Mat3& rotation);

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  double norm() const { return q_.norm(); }

  Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }
  Vec3 rotate(const Vec3& v) const { return q_ * v; }
  UnitQuaternion conjugate() const;
  UnitQuaternion operator*(const UnitQuaternion& rhs) const;

  /// Rotation angle in [0, pi] of q^-1 * other.
  double angular_distance(const UnitQuaternion& other) const;

  const Eigen::Quaterniond& eigen() const { return q_; }

 private:
  explicit UnitQuaternion(const Eigen::Quaterniond& q);
  void canonicalize();

  Eigen::Quaterniond q_;
};

/// Geodesic angle between two unit vectors, in [0, pi]. The dot product is
/// clamped to [-1, 1] before arccos.
double angle_between(const Vec3& u, const Vec3& v);

/// Advances `q` by a constant body-frame angular velocity over `dt` using the
/// exponential map, then renormalizes.
UnitQuaternion quat_integrate(const UnitQuaternion& q, const Vec3& omega_body, double dt);

/// Exponential map of a rotation vector.
UnitQuaternion quat_exp(const Vec3& rotation_vector);

}  // namespace quadtail
