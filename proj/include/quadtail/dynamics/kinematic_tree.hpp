#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadtail/math/inertia.hpp"
#include "quadtail/math/types.hpp"

namespace quadtail {

enum class JointType { kFloating, kRevolute };

enum class MarkerKind {
  kFoot,       // ground contact point
  kTailTip,    // end of the manipulator tail
  kCollision,  // non-foot point checked for ground collision only
};

/// One rigid link and the joint that attaches it to its parent.
/// The joint frame sits at `offset` in the parent frame with orientation
/// `rotation`; a revolute joint then rotates about `axis` (joint frame).
/// `inertia` is expressed in the link (post-joint) frame.
struct Link {
  std::string name;
  int parent = -1;
  JointType joint = JointType::kRevolute;
  Vec3 axis = Vec3::UnitZ();
  Vec3 offset = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  SpatialInertia inertia;
  double lower_limit = -kPi;
  double upper_limit = kPi;
  double torque_limit = 17.0;
};

struct Marker {
  std::string name;
  int link = 0;
  Vec3 position = Vec3::Zero();
  MarkerKind kind = MarkerKind::kCollision;
};

/// Floating-base kinematic tree in topological order. Link 0 is the floating
/// base; every other link hangs from a revolute joint whose index is
/// `link - 1`. Generalized velocity layout: [v_base (world), w_base (world),
/// joint rates].
class KinematicTree {
 public:
  /// `base_box` is the full size of the base collision box centered at the
  /// base origin.
  KinematicTree(Link base, const Vec3& base_box);

  int add_link(Link link);
  int add_marker(Marker marker);

  const std::vector<Link>& links() const { return links_; }
  const std::vector<Marker>& markers() const { return markers_; }
  const Link& link(int index) const { return links_.at(index); }

  int num_links() const { return static_cast<int>(links_.size()); }
  int num_joints() const { return num_links() - 1; }
  int num_dof() const { return 6 + num_joints(); }

  const Vec3& base_box() const { return base_box_; }
  double total_mass() const;

  /// Index of the named link; nullopt when absent.
  std::optional<int> find_link(const std::string& name) const;

  /// Marker indices of the feet, in insertion order.
  const std::vector<int>& foot_markers() const { return feet_; }
  std::optional<int> tail_tip_marker() const;

  /// True when `ancestor` is on the path from `link` to the root (inclusive).
  bool is_ancestor(int ancestor, int link) const;

 private:
  std::vector<Link> links_;
  std::vector<Marker> markers_;
  std::vector<int> feet_;
  Vec3 base_box_;
};

}  // namespace quadtail
