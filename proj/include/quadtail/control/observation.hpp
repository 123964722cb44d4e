#pragma once

#include <optional>

#include "quadtail/dynamics/dynamics.hpp"
#include "quadtail/rewards/rewards.hpp"

namespace quadtail {

/// Offsets of the observation segments. Joint blocks have `num_joints`
/// entries; the command block has 4 (V_x, V_y, sin, cos of the commanded
/// heading relative to the body heading) or 0.
struct ObservationLayout {
  int num_joints = 12;
  bool has_command = true;

  int joint_positions() const { return 0; }
  int joint_velocities() const { return num_joints; }
  int history1() const { return 2 * num_joints; }
  int history2() const { return 3 * num_joints; }
  int angular_velocity() const { return 4 * num_joints; }  // body frame
  int linear_velocity() const { return 4 * num_joints + 3; }  // body frame
  int body_x_axis() const { return 4 * num_joints + 6; }     // world frame
  int body_z_axis() const { return 4 * num_joints + 9; }     // world frame
  int command() const { return 4 * num_joints + 12; }
  int command_size() const { return has_command ? 4 : 0; }
  int size() const { return command() + command_size(); }
};

/// Joint positions of the two previous control steps.
struct JointHistory {
  VecX previous;         // p_{t-1}
  VecX before_previous;  // p_{t-2}

  /// Both slots set to `current`.
  void reset(const VecX& current);
  /// Shifts: p_{t-2} <- p_{t-1} <- `current`.
  void push(const VecX& current);
};

/// Body yaw: heading of the body x axis projected on the ground plane.
double body_yaw(const Mat3& base_rotation);

VecX build_observation(const ObservationLayout& layout, const SimState& state,
                       const JointHistory& history, const std::optional<Command>& command);

}  // namespace quadtail
