#pragma once

#include <yaml-cpp/yaml.h>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "quadtail/math/types.hpp"

namespace quadtail {

/// Quadruped base and leg parameters. Each leg is an abduction / hip / knee
/// chain; joint order is fr, fl, hr, hl with (abad, hip, knee) per leg.
struct QuadrupedSpec {
  std::string name = "minicheetah";
  double base_mass = 9.0;
  Vec3 base_size{0.38, 0.19, 0.11};
  Vec3 hip_offset{0.19, 0.049, 0.0};  // |x|, |y|, z of the abduction axis
  double abad_length = 0.062;
  double thigh_length = 0.209;
  double shank_length = 0.195;
  std::array<double, 3> link_masses{0.25, 0.35, 0.10};  // abad, thigh, shank
  double link_radius = 0.02;
  std::array<std::array<double, 2>, 3> limits{{{-0.8, 0.8}, {-2.8, 1.2}, {0.3, 2.7}}};
  std::array<double, 3> nominal{0.0, -0.8, 1.6};
  double torque_limit = 17.0;
  Vec3 tail_mount{-0.12, 0.0, 0.055};

  double leg_mass() const { return link_masses[0] + link_masses[1] + link_masses[2]; }
  /// q^nominal for the 12 leg joints.
  VecX nominal_joints() const;
  /// Base height that puts the feet on the ground in the nominal pose.
  double standing_height() const;
  void validate() const;
};

/// Six-joint serial manipulator used as a tail. Link i extends along -x of its
/// own frame; joint i sits at the end of link i - 1 (joint 0 at the mount).
struct TailSpec {
  std::string name;
  double total_length = 0.0;  // m
  double total_mass = 0.0;    // kg
  std::vector<double> length_fractions;
  std::vector<double> mass_fractions;
  double tip_mass_fraction = 0.15;  // gripper share of the total mass
  double link_radius = 0.03;
  double tip_radius = 0.05;
  std::vector<Vec3> axes;
  std::vector<std::array<double, 2>> limits;
  std::vector<double> nominal;  // p^arm_nominal
  double torque_limit = 17.0;

  static constexpr int kJoints = 6;

  /// Mass distribution proportional to link length for (1 - tip_share) of the
  /// total plus `tip_share` concentrated on the last link.
  static std::vector<double> length_proportional_masses(const std::vector<double>& lengths,
                                                        double tip_share);

  VecX nominal_joints() const;
  void validate() const;
};

enum class TailVariant { kNone, kWidowX250S, kViperX300S };

std::string to_string(TailVariant variant);
TailVariant parse_tail_variant(const std::string& name);

QuadrupedSpec quadruped_from_config(const YAML::Node& root);
TailSpec tail_from_config(const YAML::Node& root);

QuadrupedSpec load_quadruped_spec(const std::filesystem::path& path);
TailSpec load_tail_spec(const std::filesystem::path& path);

/// Directory holding minicheetah.cfg, widowx250s.cfg and viperx300s.cfg in
/// the source tree.
std::filesystem::path default_model_dir();

}  // namespace quadtail
