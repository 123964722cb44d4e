#include "quadtail/math/inertia.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

SpatialInertia::SpatialInertia(double mass, const Vec3& com, const Mat3& inertia_com)
    : mass_(mass), com_(com), inertia_com_(inertia_com) {
  if (!std::isfinite(mass) || mass < 0.0) throw PreconditionError("mass must be >= 0");
  if (!com.allFinite() || !inertia_com.allFinite())
    throw PreconditionError("inertia must be finite");
  const double scale = std::max(1.0, inertia_com.cwiseAbs().maxCoeff());
  if ((inertia_com - inertia_com.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw PreconditionError("rotational inertia must be symmetric");
  inertia_com_ = 0.5 * (inertia_com + inertia_com.transpose());

  const Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia_com_);
  Vec3 principal = eig.eigenvalues();
  const double tol = 1e-9 * scale;
  if (principal.minCoeff() < -tol)
    throw PreconditionError("rotational inertia must be positive semi-definite");
  std::sort(principal.data(), principal.data() + 3);
  if (principal[0] + principal[1] < principal[2] - tol)
    throw PreconditionError("principal moments violate the triangle inequality");
}

SpatialInertia SpatialInertia::point_mass(double mass, const Vec3& position) {
  return {mass, position, Mat3::Zero()};
}

SpatialInertia SpatialInertia::box(double mass, const Vec3& size, const Vec3& center) {
  const Vec3 s2 = size.cwiseProduct(size);
  Mat3 inertia = Mat3::Zero();
  inertia(0, 0) = mass * (s2.y() + s2.z()) / 12.0;
  inertia(1, 1) = mass * (s2.x() + s2.z()) / 12.0;
  inertia(2, 2) = mass * (s2.x() + s2.y()) / 12.0;
  return {mass, center, inertia};
}

SpatialInertia SpatialInertia::cylinder(double mass, double radius, const Vec3& from,
                                        const Vec3& to) {
  const Vec3 axis_vec = to - from;
  const double length = axis_vec.norm();
  if (length < 1e-12) return sphere(mass, radius, from);
  const Vec3 axis = axis_vec / length;
  const double axial = 0.5 * mass * radius * radius;
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  const Mat3 inertia = transverse * Mat3::Identity() + (axial - transverse) * axis * axis.transpose();
  return {mass, 0.5 * (from + to), inertia};
}

SpatialInertia SpatialInertia::sphere(double mass, double radius, const Vec3& center) {
  return {mass, center, 0.4 * mass * radius * radius * Mat3::Identity()};
}

Mat3 SpatialInertia::inertia_about_origin() const {
  return inertia_com_ + mass_ * (com_.dot(com_) * Mat3::Identity() - com_ * com_.transpose());
}

Mat6 SpatialInertia::spatial_matrix() const {
  const Mat3 c = skew(com_);
  Mat6 m;
  m.topLeftCorner<3, 3>() = inertia_com_ + mass_ * c * c.transpose();
  m.topRightCorner<3, 3>() = mass_ * c;
  m.bottomLeftCorner<3, 3>() = mass_ * c.transpose();
  m.bottomRightCorner<3, 3>() = mass_ * Mat3::Identity();
  return m;
}

SpatialInertia SpatialInertia::operator+(const SpatialInertia& other) const {
  const double m = mass_ + other.mass_;
  if (m <= 0.0) return {};
  const Vec3 c = (mass_ * com_ + other.mass_ * other.com_) / m;
  auto shifted = [&c](const SpatialInertia& s) {
    const Vec3 d = s.com_ - c;
    return Mat3(s.inertia_com_ + s.mass_ * (d.dot(d) * Mat3::Identity() - d * d.transpose()));
  };
  return {m, c, shifted(*this) + shifted(other)};
}

SpatialInertia transform_inertia(const SpatialInertia& inertia, const Mat3& rotation,
                                 const Vec3& translation) {
  if ((rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      rotation.determinant() < 0.0)
    throw PreconditionError("transform_inertia requires a proper rotation matrix");
  return {inertia.mass(), rotation * inertia.com() + translation,
          rotation * inertia.inertia_com() * rotation.transpose()};
}

bool is_symmetric_positive_definite(const MatX& m, double symmetry_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale) return false;
  const Eigen::LLT<MatX> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace quadtail
