#include "quadtail/envs/termination.hpp"

#include "quadtail/common/errors.hpp"

namespace quadtail {

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::kNone: return "none";
    case TerminationReason::kBodyCollision: return "body_collision";
    case TerminationReason::kSmoothness: return "smoothness";
    case TerminationReason::kTorque: return "torque";
    case TerminationReason::kJointPosition: return "joint_position";
    case TerminationReason::kAerialPhaseEnd: return "aerial_phase_end";
  }
  return "none";
}

void TerminationRules::validate() const {
  if (!(smoothness_limit > 0.0)) throw ConfigError("termination.smoothness_limit", "must be positive");
  if (!(torque_limit > 0.0)) throw ConfigError("termination.torque_limit", "must be positive");
  if (!(joint_limit > 0.0)) throw ConfigError("termination.joint_limit", "must be positive");
  if (!(penalty <= 0.0)) throw ConfigError("termination.penalty", "must be <= 0");
}

std::optional<TerminationReason> check_termination(bool body_contact, const VecX& torques,
                                                   const VecX& q_des, const VecX& q_des_prev,
                                                   const VecX& joint_positions,
                                                   const VecX& q_nominal,
                                                   const TerminationRules& rules) {
  if (q_des.size() != q_des_prev.size() || joint_positions.size() != q_nominal.size())
    throw PreconditionError("check_termination: size mismatch");
  if (rules.body_collision && body_contact) return TerminationReason::kBodyCollision;
  if ((q_des - q_des_prev).squaredNorm() > rules.smoothness_limit) return TerminationReason::kSmoothness;
  if (torques.squaredNorm() > rules.torque_limit) return TerminationReason::kTorque;
  if ((joint_positions - q_nominal).squaredNorm() > rules.joint_limit)
    return TerminationReason::kJointPosition;
  return std::nullopt;
}

}  // namespace quadtail
