#pragma once

#include "quadtail/math/types.hpp"

namespace quadtail {

struct PDGains {
  double kp = 17.0;  // N m / rad
  double kd = 0.4;   // N m s / rad

  void validate() const;
};

/// q_des = q_nominal + sigma * a, clamped to [lower, upper].
struct ActionScaling {
  double sigma = 0.3;
  VecX nominal;
  VecX lower;
  VecX upper;

  VecX scale(const VecX& action) const;
};

/// tau = kp (q_des - p) - kd pdot, each entry clamped to +-limit.
VecX pd_torque(const VecX& q_des, const VecX& positions, const VecX& velocities,
               const PDGains& gains, const VecX& torque_limits);

}  // namespace quadtail
