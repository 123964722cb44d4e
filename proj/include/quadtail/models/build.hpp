#pragma once

#include <memory>
#include <optional>

#include "quadtail/dynamics/dynamics.hpp"
#include "quadtail/models/specs.hpp"

namespace quadtail {

/// A built robot: tree plus the specs it came from and the joint layout.
/// Legs occupy joints 0..11 (fr, fl, hr, hl x abad, hip, knee); a tail adds
/// joints 12..17.
struct RobotModel {
  KinematicTree tree;
  QuadrupedSpec quadruped;
  std::optional<TailSpec> tail;

  int num_joints() const { return tree.num_joints(); }
  bool has_tail() const { return tail.has_value(); }
  /// Concatenated q^nominal (12 or 18 values).
  VecX nominal_joints() const;
  VecX lower_limits() const;
  VecX upper_limits() const;
  VecX torque_limits() const;
  /// Link index of the first tail link, or -1.
  int tail_root_link() const;
};

/// Leg chains hang from the base at the hip offsets; the tail mounts at the
/// rear of the base with its links pointing backward at zero joint angles.
RobotModel build_robot(const QuadrupedSpec& quad, const std::optional<TailSpec>& tail);

/// Joints at nominal, base at the standing height, zero velocities.
SimState nominal_state(const RobotModel& model);

/// Loads minicheetah.cfg and the requested tail from `model_dir`.
RobotModel build_variant(TailVariant variant,
                         const std::filesystem::path& model_dir = default_model_dir());

/// Tail rotational inertia about the mount point in the nominal pose,
/// expressed in base axes.
Mat3 tail_inertia_about_mount(const RobotModel& model);

/// Distance from the mount to the tail tip with the chain stretched out.
double tail_reach(const RobotModel& model);

}  // namespace quadtail
