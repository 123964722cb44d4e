#include "quadtail/math/spatial.hpp"

namespace quadtail {

Mat6 world_spatial_inertia(const SpatialInertia& body, const Mat3& rotation, const Vec3& position) {
  const double m = body.mass();
  const Vec3 c = rotation * body.com() + position;
  const Mat3 cx = skew(c);
  Mat6 out;
  out.topLeftCorner<3, 3>() =
      rotation * body.inertia_com() * rotation.transpose() + m * cx * cx.transpose();
  out.topRightCorner<3, 3>() = m * cx;
  out.bottomLeftCorner<3, 3>() = m * cx.transpose();
  out.bottomRightCorner<3, 3>() = m * Mat3::Identity();
  return out;
}

}  // namespace quadtail
