#include "quadtail/dynamics/model_io.hpp"

#include <fstream>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"
#include "quadtail/math/quaternion.hpp"

namespace quadtail {
namespace {

YAML::Node vec_node(const Eigen::VectorXd& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int i = 0; i < v.size(); ++i) n.push_back(v[i]);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

Eigen::VectorXd read_vec(const YAML::Node& n, const std::string& field, int size) {
  if (!n.IsSequence() || static_cast<int>(n.size()) != size)
    throw ConfigError(field, "expected a list of " + std::to_string(size) + " numbers");
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) {
    try {
      v[i] = n[i].as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field, "not a number");
    }
  }
  return v;
}

const char* kind_name(MarkerKind kind) {
  switch (kind) {
    case MarkerKind::kFoot: return "foot";
    case MarkerKind::kTailTip: return "tail_tip";
    case MarkerKind::kCollision: return "collision";
  }
  return "collision";
}

MarkerKind parse_kind(const std::string& s, const std::string& field) {
  if (s == "foot") return MarkerKind::kFoot;
  if (s == "tail_tip") return MarkerKind::kTailTip;
  if (s == "collision") return MarkerKind::kCollision;
  throw ConfigError(field, "unknown marker kind '" + s + "'");
}

Link parse_link(const YAML::Node& n, const KinematicTree* tree, const std::string& field) {
  Link l;
  l.name = read_required<std::string>(n, "name");
  const auto joint = read_or<std::string>(n, "joint", "revolute");
  if (joint == "floating") {
    l.joint = JointType::kFloating;
  } else if (joint == "revolute") {
    l.joint = JointType::kRevolute;
  } else {
    throw ConfigError(field + ".joint", "unknown joint type '" + joint + "'");
  }
  const double mass = read_or<double>(n, "mass", 0.0);
  const Vec3 com = n["com"] ? Vec3(read_vec(n["com"], field + ".com", 3)) : Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
  if (n["inertia"]) {
    const auto v = read_vec(n["inertia"], field + ".inertia", 6);
    inertia << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
  }
  try {
    l.inertia = SpatialInertia(mass, com, inertia);
  } catch (const PreconditionError& e) {
    throw ConfigError(field + ".inertia", e.what());
  }
  if (l.joint == JointType::kFloating) return l;

  const auto parent = read_required<std::string>(n, "parent");
  const auto parent_index = tree->find_link(parent);
  if (!parent_index) throw ConfigError(field + ".parent", "unknown link '" + parent + "'");
  l.parent = *parent_index;
  l.axis = read_vec(n["axis"], field + ".axis", 3);
  if (n["offset"]) l.offset = read_vec(n["offset"], field + ".offset", 3);
  if (n["rotation"]) {
    const auto q = read_vec(n["rotation"], field + ".rotation", 4);
    l.rotation = UnitQuaternion(q[0], q[1], q[2], q[3]).rotation_matrix();
  }
  if (n["limits"]) {
    const auto lim = read_vec(n["limits"], field + ".limits", 2);
    l.lower_limit = lim[0];
    l.upper_limit = lim[1];
  }
  l.torque_limit = read_or<double>(n, "torque_limit", l.torque_limit);
  return l;
}

}  // namespace

YAML::Node tree_to_config(const KinematicTree& tree) {
  YAML::Node root;
  root["base_box"] = vec_node(tree.base_box());
  for (int i = 0; i < tree.num_links(); ++i) {
    const Link& l = tree.link(i);
    YAML::Node n;
    n["name"] = l.name;
    if (l.joint == JointType::kFloating) {
      n["joint"] = "floating";
    } else {
      n["parent"] = tree.link(l.parent).name;
      n["joint"] = "revolute";
      n["axis"] = vec_node(l.axis);
      n["offset"] = vec_node(l.offset);
      if (!l.rotation.isIdentity(0.0)) {
        const auto q = UnitQuaternion::from_rotation_matrix(l.rotation);
        n["rotation"] = vec_node(Eigen::Vector4d(q.w(), q.x(), q.y(), q.z()));
      }
      n["limits"] = vec_node(Eigen::Vector2d(l.lower_limit, l.upper_limit));
      n["torque_limit"] = l.torque_limit;
    }
    const Mat3& in = l.inertia.inertia_com();
    n["mass"] = l.inertia.mass();
    n["com"] = vec_node(l.inertia.com());
    Eigen::VectorXd iv(6);
    iv << in(0, 0), in(1, 1), in(2, 2), in(0, 1), in(0, 2), in(1, 2);
    n["inertia"] = vec_node(iv);
    root["links"].push_back(n);
  }
  for (const auto& m : tree.markers()) {
    YAML::Node n;
    n["name"] = m.name;
    n["link"] = tree.link(m.link).name;
    n["position"] = vec_node(m.position);
    n["kind"] = kind_name(m.kind);
    root["markers"].push_back(n);
  }
  return root;
}

KinematicTree tree_from_config(const YAML::Node& node) {
  const YAML::Node links = node["links"];
  if (!links || !links.IsSequence() || links.size() == 0)
    throw ConfigError("links", "expected a non-empty list");
  const Vec3 box = read_vec(node["base_box"], "base_box", 3);

  KinematicTree tree(parse_link(links[0], nullptr, "links[0]"), box);
  for (std::size_t i = 1; i < links.size(); ++i) {
    const std::string field = "links[" + std::to_string(i) + "]";
    try {
      tree.add_link(parse_link(links[i], &tree, field));
    } catch (const PreconditionError& e) {
      throw ConfigError(field, e.what());
    }
  }
  if (const YAML::Node markers = node["markers"]) {
    for (std::size_t i = 0; i < markers.size(); ++i) {
      const std::string field = "markers[" + std::to_string(i) + "]";
      const YAML::Node m = markers[i];
      const auto link_name = read_required<std::string>(m, "link");
      const auto link = tree.find_link(link_name);
      if (!link) throw ConfigError(field + ".link", "unknown link '" + link_name + "'");
      tree.add_marker({read_required<std::string>(m, "name"), *link,
                       read_vec(m["position"], field + ".position", 3),
                       parse_kind(read_or<std::string>(m, "kind", "collision"), field + ".kind")});
    }
  }
  return tree;
}

void save_tree(const KinematicTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("", "cannot write " + path.string());
  out << dump_config(tree_to_config(tree)) << '\n';
}

KinematicTree load_tree(const std::filesystem::path& path) {
  return tree_from_config(load_config_file(path));
}

}  // namespace quadtail
