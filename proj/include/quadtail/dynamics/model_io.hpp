#pragma once

#include <yaml-cpp/yaml.h>

#include <filesystem>

#include "quadtail/dynamics/kinematic_tree.hpp"

namespace quadtail {

// Kinematic tree file layout (YAML):
//
//   base_box: [sx, sy, sz]
//   links:
//     - name: base
//       joint: floating
//       mass: 9.0
//       com: [x, y, z]
//       inertia: [ixx, iyy, izz, ixy, ixz, iyz]   # about the COM
//     - name: fr_abad
//       parent: base
//       joint: revolute
//       axis: [1, 0, 0]
//       offset: [x, y, z]            # joint origin in the parent frame
//       rotation: [w, x, y, z]       # optional joint frame orientation
//       limits: [lower, upper]       # rad
//       torque_limit: 17.0
//       ...
//   markers:
//     - {name: fr_foot, link: fr_shank, position: [0, 0, -0.195], kind: foot}
//
// `kind` is one of foot | tail_tip | collision.

YAML::Node tree_to_config(const KinematicTree& tree);
KinematicTree tree_from_config(const YAML::Node& node);

void save_tree(const KinematicTree& tree, const std::filesystem::path& path);
KinematicTree load_tree(const std::filesystem::path& path);

}  // namespace quadtail
