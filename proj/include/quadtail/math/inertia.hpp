#pragma once

#include "quadtail/math/types.hpp"

namespace quadtail {

/// Rigid-body inertia: mass, center of mass in the body frame, and rotational
/// inertia about the center of mass in body axes.
///
/// Zero mass is accepted (massless frames); otherwise the rotational inertia
/// must be symmetric positive semi-definite with principal moments satisfying
/// the triangle inequality. Point masses have zero rotational inertia.
class SpatialInertia {
 public:
  SpatialInertia() = default;
  SpatialInertia(double mass, const Vec3& com, const Mat3& inertia_com);

  static SpatialInertia massless() { return {}; }
  static SpatialInertia point_mass(double mass, const Vec3& position);
  /// Solid box with full side lengths `size`, centered at `center`.
  static SpatialInertia box(double mass, const Vec3& size, const Vec3& center = Vec3::Zero());
  /// Solid cylinder of `radius` whose axis runs from `from` to `to`.
  static SpatialInertia cylinder(double mass, double radius, const Vec3& from, const Vec3& to);
  static SpatialInertia sphere(double mass, double radius, const Vec3& center);

  double mass() const { return mass_; }
  const Vec3& com() const { return com_; }
  const Mat3& inertia_com() const { return inertia_com_; }

  /// Rotational inertia about the frame origin (parallel-axis theorem).
  Mat3 inertia_about_origin() const;

  /// 6x6 spatial inertia at the frame origin, [angular; linear] ordering.
  Mat6 spatial_matrix() const;

  /// Inertia of the union of two bodies expressed in the same frame.
  SpatialInertia operator+(const SpatialInertia& other) const;

 private:
  double mass_ = 0.0;
  Vec3 com_ = Vec3::Zero();
  Mat3 inertia_com_ = Mat3::Zero();
};

/// Re-expresses `inertia` in a parent frame where the body frame has the given
/// orientation and origin: com' = R com + t, I_com' = R I_com R^T. The inertia
/// about the new origin therefore gains m (d^T d 1 - d d^T), d = com'.
SpatialInertia transform_inertia(const SpatialInertia& inertia, const Mat3& rotation,
                                 const Vec3& translation);

/// True when `m` is symmetric and positive definite (Cholesky succeeds).
bool is_symmetric_positive_definite(const MatX& m, double symmetry_tol = 1e-10);

}  // namespace quadtail
