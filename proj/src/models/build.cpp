#include "quadtail/models/build.hpp"

#include <algorithm>

#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

constexpr const char* kLegNames[4] = {"fr", "fl", "hr", "hl"};
constexpr double kLegSide[4] = {-1.0, 1.0, -1.0, 1.0};   // y sign
constexpr double kLegFront[4] = {1.0, 1.0, -1.0, -1.0};  // x sign

Link revolute(const std::string& name, int parent, const Vec3& axis, const Vec3& offset,
              const SpatialInertia& inertia, double lower, double upper, double torque_limit) {
  Link l;
  l.name = name;
  l.parent = parent;
  l.joint = JointType::kRevolute;
  l.axis = axis;
  l.offset = offset;
  l.inertia = inertia;
  l.lower_limit = lower;
  l.upper_limit = upper;
  l.torque_limit = torque_limit;
  return l;
}

void add_leg(KinematicTree& tree, const QuadrupedSpec& q, int leg) {
  const std::string prefix = kLegNames[leg];
  const double side = kLegSide[leg];
  const Vec3 hip(kLegFront[leg] * q.hip_offset.x(), side * q.hip_offset.y(), q.hip_offset.z());
  const Vec3 abad_end(0.0, side * q.abad_length, 0.0);
  const Vec3 knee(0.0, 0.0, -q.thigh_length);
  const Vec3 foot(0.0, 0.0, -q.shank_length);

  const int abad = tree.add_link(revolute(
      prefix + "_abad", 0, Vec3::UnitX(), hip,
      SpatialInertia::cylinder(q.link_masses[0], 1.5 * q.link_radius, Vec3::Zero(), abad_end),
      q.limits[0][0], q.limits[0][1], q.torque_limit));
  const int thigh = tree.add_link(revolute(
      prefix + "_thigh", abad, Vec3::UnitY(), abad_end,
      SpatialInertia::cylinder(q.link_masses[1], q.link_radius, Vec3::Zero(), knee),
      q.limits[1][0], q.limits[1][1], q.torque_limit));
  const int shank = tree.add_link(revolute(
      prefix + "_shank", thigh, Vec3::UnitY(), knee,
      SpatialInertia::cylinder(q.link_masses[2], 0.5 * q.link_radius, Vec3::Zero(), foot),
      q.limits[2][0], q.limits[2][1], q.torque_limit));
  tree.add_marker({prefix + "_knee", shank, Vec3::Zero(), MarkerKind::kCollision});
  tree.add_marker({prefix + "_foot", shank, foot, MarkerKind::kFoot});
}

void add_tail(KinematicTree& tree, const QuadrupedSpec& q, const TailSpec& t) {
  int parent = 0;
  Vec3 offset = q.tail_mount;
  for (int i = 0; i < TailSpec::kJoints; ++i) {
    const double length = t.length_fractions[i] * t.total_length;
    const double mass = t.mass_fractions[i] * t.total_mass;
    const Vec3 end(-length, 0.0, 0.0);
    SpatialInertia inertia;
    if (i + 1 == TailSpec::kJoints) {
      // the last link carries the gripper share as a sphere at its end
      const double tip = std::min(mass, t.tip_mass_fraction * t.total_mass);
      inertia = SpatialInertia::cylinder(mass - tip, t.link_radius, Vec3::Zero(), end) +
                SpatialInertia::sphere(tip, t.tip_radius, end);
    } else {
      inertia = SpatialInertia::cylinder(mass, t.link_radius, Vec3::Zero(), end);
    }
    parent = tree.add_link(revolute("tail_" + std::to_string(i), parent, t.axes[i], offset, inertia,
                                    t.limits[i][0], t.limits[i][1], t.torque_limit));
    if (i > 0) tree.add_marker({"tail_joint_" + std::to_string(i), parent, Vec3::Zero(), MarkerKind::kCollision});
    offset = end;
  }
  tree.add_marker({"tail_tip", parent, offset, MarkerKind::kTailTip});
}

}  // namespace

VecX RobotModel::nominal_joints() const {
  VecX q(num_joints());
  q.head(12) = quadruped.nominal_joints();
  if (tail) q.tail(TailSpec::kJoints) = tail->nominal_joints();
  return q;
}

VecX RobotModel::lower_limits() const {
  VecX v(num_joints());
  for (int j = 0; j < num_joints(); ++j) v[j] = tree.link(j + 1).lower_limit;
  return v;
}

VecX RobotModel::upper_limits() const {
  VecX v(num_joints());
  for (int j = 0; j < num_joints(); ++j) v[j] = tree.link(j + 1).upper_limit;
  return v;
}

VecX RobotModel::torque_limits() const {
  VecX v(num_joints());
  for (int j = 0; j < num_joints(); ++j) v[j] = tree.link(j + 1).torque_limit;
  return v;
}

int RobotModel::tail_root_link() const { return tail ? 13 : -1; }

RobotModel build_robot(const QuadrupedSpec& quad, const std::optional<TailSpec>& tail) {
  quad.validate();
  if (tail) tail->validate();
  Link base;
  base.name = "base";
  base.parent = -1;
  base.joint = JointType::kFloating;
  base.inertia = SpatialInertia::box(quad.base_mass, quad.base_size);
  KinematicTree tree(base, quad.base_size);
  for (int leg = 0; leg < 4; ++leg) add_leg(tree, quad, leg);
  if (tail) add_tail(tree, quad, *tail);
  return RobotModel{std::move(tree), quad, tail};
}

SimState nominal_state(const RobotModel& model) {
  SimState s = SimState::zeros(model.num_joints());
  s.base_position = Vec3(0.0, 0.0, model.quadruped.standing_height());
  s.joint_positions = model.nominal_joints();
  return s;
}

RobotModel build_variant(TailVariant variant, const std::filesystem::path& model_dir) {
  const QuadrupedSpec quad = load_quadruped_spec(model_dir / "minicheetah.cfg");
  if (variant == TailVariant::kNone) return build_robot(quad, std::nullopt);
  return build_robot(quad, load_tail_spec(model_dir / (to_string(variant) + ".cfg")));
}

Mat3 tail_inertia_about_mount(const RobotModel& model) {
  if (!model.has_tail()) return Mat3::Zero();
  SimState s = nominal_state(model);
  s.base_position.setZero();
  const Kinematics k = forward_kinematics(model.tree, s);
  const Vec3 mount = model.quadruped.tail_mount;
  Mat3 total = Mat3::Zero();
  for (int l = model.tail_root_link(); l < model.tree.num_links(); ++l) {
    const SpatialInertia world =
        transform_inertia(model.tree.link(l).inertia, k.links[l].rotation, k.links[l].position - mount);
    total += world.inertia_about_origin();
  }
  return total;
}

double tail_reach(const RobotModel& model) {
  if (!model.has_tail()) return 0.0;
  double reach = 0.0;
  for (double f : model.tail->length_fractions) reach += f * model.tail->total_length;
  return reach;
}

}  // namespace quadtail
