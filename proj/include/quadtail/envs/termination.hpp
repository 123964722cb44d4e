#pragma once

#include <optional>

#include "quadtail/math/types.hpp"

namespace quadtail {

enum class TerminationReason {
  kNone = 0,
  kBodyCollision = 1,
  kSmoothness = 2,
  kTorque = 3,
  kJointPosition = 4,
  kAerialPhaseEnd = 5,  // aerial-only reorientation reached p_z < 0.4 (no penalty)
};

const char* to_string(TerminationReason r);

/// Limits apply to squared norms over the leg joints and trigger strictly
/// above the limit.
struct TerminationRules {
  bool body_collision = true;
  double smoothness_limit = 2.0;  // |q_des_t - q_des_{t-1}|^2
  double torque_limit = 180.0;    // |tau|^2
  double joint_limit = 5.0;       // |p_t - p_nominal|^2
  double penalty = -10.0;         // replaces the step reward

  void validate() const;
};

/// First violated rule in the order collision, smoothness, torque, joint
/// position; nullopt when none is violated.
std::optional<TerminationReason> check_termination(bool body_contact, const VecX& torques,
                                                   const VecX& q_des, const VecX& q_des_prev,
                                                   const VecX& joint_positions,
                                                   const VecX& q_nominal,
                                                   const TerminationRules& rules);

}  // namespace quadtail
