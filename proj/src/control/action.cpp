#include "quadtail/control/action.hpp"

#include "quadtail/common/errors.hpp"

namespace quadtail {

void PDGains::validate() const {
  if (!(kp > 0.0)) throw ConfigError("control.kp", "must be positive");
  if (!(kd > 0.0)) throw ConfigError("control.kd", "must be positive");
}

VecX ActionScaling::scale(const VecX& action) const {
  if (action.size() != nominal.size() || lower.size() != nominal.size() ||
      upper.size() != nominal.size())
    throw PreconditionError("scale_action: size mismatch");
  return (nominal + sigma * action).cwiseMax(lower).cwiseMin(upper);
}

VecX pd_torque(const VecX& q_des, const VecX& positions, const VecX& velocities,
               const PDGains& gains, const VecX& torque_limits) {
  const auto n = q_des.size();
  if (positions.size() != n || velocities.size() != n || torque_limits.size() != n)
    throw PreconditionError("pd_torque: size mismatch");
  const VecX tau = gains.kp * (q_des - positions) - gains.kd * velocities;
  return tau.cwiseMax(-torque_limits).cwiseMin(torque_limits);
}

}  // namespace quadtail
