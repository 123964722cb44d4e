#pragma once

#include "quadtail/math/inertia.hpp"
#include "quadtail/math/types.hpp"

// Plucker spatial vectors with [angular; linear] ordering. All dynamics code
// expresses them in world coordinates about the world origin.

namespace quadtail {

inline Vec3 angular(const Vec6& v) { return v.head<3>(); }
inline Vec3 linear(const Vec6& v) { return v.tail<3>(); }

inline Vec6 spatial(const Vec3& ang, const Vec3& lin) {
  Vec6 v;
  v << ang, lin;
  return v;
}

/// Motion cross product v x m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = angular(v);
  return spatial(w.cross(angular(m)), w.cross(linear(m)) + linear(v).cross(angular(m)));
}

/// Force cross product v x* f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = angular(v);
  return spatial(w.cross(angular(f)) + linear(v).cross(linear(f)), w.cross(linear(f)));
}

/// Velocity of the material point currently at `p` for a body moving with
/// spatial velocity `v`.
inline Vec3 point_velocity(const Vec6& v, const Vec3& p) {
  return linear(v) + angular(v).cross(p);
}

/// Spatial force at the origin equivalent to force `f` acting at point `p`.
inline Vec6 force_at_point(const Vec3& f, const Vec3& p) { return spatial(p.cross(f), f); }

/// Spatial inertia of a body with world orientation `rotation` and origin
/// `position`, expressed about the world origin.
Mat6 world_spatial_inertia(const SpatialInertia& body, const Mat3& rotation, const Vec3& position);

}  // namespace quadtail
