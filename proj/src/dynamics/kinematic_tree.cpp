#include "quadtail/dynamics/kinematic_tree.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

KinematicTree::KinematicTree(Link base, const Vec3& base_box) : base_box_(base_box) {
  if (base.joint != JointType::kFloating)
    throw PreconditionError("the root link must have a floating joint");
  if ((base_box.array() <= 0.0).any()) throw PreconditionError("base box must be positive");
  base.parent = -1;
  links_.push_back(std::move(base));
}

int KinematicTree::add_link(Link link) {
  const int index = num_links();
  if (link.joint == JointType::kFloating)
    throw PreconditionError("only the root link may be floating: " + link.name);
  if (link.parent < 0 || link.parent >= index)
    throw PreconditionError("parent index must precede link " + link.name);
  if (std::abs(link.axis.norm() - 1.0) > 1e-9)
    throw PreconditionError("joint axis must be unit-norm: " + link.name);
  if (!(link.lower_limit < link.upper_limit))
    throw PreconditionError("joint limits must be ordered: " + link.name);
  if (!(link.torque_limit > 0.0))
    throw PreconditionError("torque limit must be positive: " + link.name);
  if ((link.rotation * link.rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw PreconditionError("joint frame rotation must be orthonormal: " + link.name);
  if (find_link(link.name)) throw PreconditionError("duplicate link name " + link.name);
  links_.push_back(std::move(link));
  return index;
}

int KinematicTree::add_marker(Marker marker) {
  if (marker.link < 0 || marker.link >= num_links())
    throw PreconditionError("marker references unknown link: " + marker.name);
  const int index = static_cast<int>(markers_.size());
  if (marker.kind == MarkerKind::kFoot) feet_.push_back(index);
  markers_.push_back(std::move(marker));
  return index;
}

double KinematicTree::total_mass() const {
  double m = 0.0;
  for (const auto& l : links_) m += l.inertia.mass();
  return m;
}

std::optional<int> KinematicTree::find_link(const std::string& name) const {
  for (int i = 0; i < num_links(); ++i) {
    if (links_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> KinematicTree::tail_tip_marker() const {
  for (int i = 0; i < static_cast<int>(markers_.size()); ++i) {
    if (markers_[i].kind == MarkerKind::kTailTip) return i;
  }
  return std::nullopt;
}

bool KinematicTree::is_ancestor(int ancestor, int link) const {
  for (int i = link; i >= 0; i = links_[i].parent) {
    if (i == ancestor) return true;
  }
  return false;
}

}  // namespace quadtail
