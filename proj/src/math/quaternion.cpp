#include "quadtail/math/quaternion.hpp"

#include <algorithm>
#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) {
  const double n = q_.norm();
  if (!std::isfinite(n) || n < 1e-12)
    throw PreconditionError("quaternion must be finite and non-zero");
  canonicalize();
}

UnitQuaternion::UnitQuaternion(const Eigen::Quaterniond& q) : q_(q) { canonicalize(); }

void UnitQuaternion::canonicalize() {
  q_.normalize();
  if (q_.w() < 0.0) q_.coeffs() *= -1.0;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-12) throw PreconditionError("rotation axis must be non-zero");
  return UnitQuaternion(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)));
}

UnitQuaternion UnitQuaternion::from_rotation_matrix(const Mat3& rotation) {
  return UnitQuaternion(Eigen::Quaterniond(rotation));
}

UnitQuaternion UnitQuaternion::conjugate() const { return UnitQuaternion(q_.conjugate()); }

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& rhs) const {
  return UnitQuaternion(q_ * rhs.q_);
}

double UnitQuaternion::angular_distance(const UnitQuaternion& other) const {
  // atan2 form stays accurate near zero where acos loses half the digits
  const Eigen::Quaterniond rel = q_.conjugate() * other.q_;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

double angle_between(const Vec3& u, const Vec3& v) {
  if (std::abs(u.norm() - 1.0) > 1e-6 || std::abs(v.norm() - 1.0) > 1e-6)
    throw PreconditionError("angle_between expects unit vectors");
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

UnitQuaternion quat_exp(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle < 1e-9) {
    // second-order Taylor expansion of (cos(a/2), sin(a/2)/a * v)
    const Vec3 half = 0.5 * rotation_vector;
    return UnitQuaternion(1.0 - angle * angle / 8.0, half.x(), half.y(), half.z());
  }
  const double s = std::sin(0.5 * angle) / angle;
  return UnitQuaternion(std::cos(0.5 * angle), s * rotation_vector.x(),
                        s * rotation_vector.y(), s * rotation_vector.z());
}

UnitQuaternion quat_integrate(const UnitQuaternion& q, const Vec3& omega_body, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("quat_integrate requires dt > 0");
  if (omega_body.isZero(0.0)) return q;
  return q * quat_exp(omega_body * dt);
}

}  // namespace quadtail
