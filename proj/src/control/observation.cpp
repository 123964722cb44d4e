#include "quadtail/control/observation.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

void JointHistory::reset(const VecX& current) {
  previous = current;
  before_previous = current;
}

void JointHistory::push(const VecX& current) {
  before_previous = previous;
  previous = current;
}

double body_yaw(const Mat3& base_rotation) {
  return std::atan2(base_rotation(1, 0), base_rotation(0, 0));
}

VecX build_observation(const ObservationLayout& layout, const SimState& state,
                       const JointHistory& history, const std::optional<Command>& command) {
  const int n = layout.num_joints;
  if (state.joint_positions.size() != n || state.joint_velocities.size() != n ||
      history.previous.size() != n || history.before_previous.size() != n)
    throw PreconditionError("build_observation: joint count mismatch");
  if (layout.has_command != command.has_value())
    throw PreconditionError("build_observation: command presence does not match the layout");

  const Mat3 r = state.base_orientation.rotation_matrix();
  VecX obs(layout.size());
  obs.segment(layout.joint_positions(), n) = state.joint_positions;
  obs.segment(layout.joint_velocities(), n) = state.joint_velocities;
  obs.segment(layout.history1(), n) = history.previous;
  obs.segment(layout.history2(), n) = history.before_previous;
  obs.segment<3>(layout.angular_velocity()) = state.base_angular_velocity;
  obs.segment<3>(layout.linear_velocity()) = r.transpose() * state.base_linear_velocity;
  obs.segment<3>(layout.body_x_axis()) = r.col(0);
  obs.segment<3>(layout.body_z_axis()) = r.col(2);
  if (command) {
    const double rel = command->heading - body_yaw(r);
    const int c = layout.command();
    obs[c] = command->vx;
    obs[c + 1] = command->vy;
    obs[c + 2] = std::sin(rel);
    obs[c + 3] = std::cos(rel);
  }
  return obs;
}

}  // namespace quadtail
