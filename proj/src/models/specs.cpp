#include "quadtail/models/specs.hpp"

#include <cmath>
#include <numeric>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

Vec3 read_vec3(const YAML::Node& root, const std::string& key, const Vec3& fallback) {
  const YAML::Node n = lookup(root, key);
  if (!n.IsDefined()) return fallback;
  const auto v = read_or<std::vector<double>>(root, key, {});
  if (v.size() != 3) throw ConfigError(key, "expected 3 numbers");
  return {v[0], v[1], v[2]};
}

std::array<double, 2> read_pair(const YAML::Node& n, const std::string& field) {
  std::vector<double> v;
  try {
    v = n.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "expected [lower, upper]");
  }
  if (v.size() != 2) throw ConfigError(field, "expected [lower, upper]");
  return {v[0], v[1]};
}

double fraction_sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

VecX QuadrupedSpec::nominal_joints() const {
  VecX q(12);
  for (int leg = 0; leg < 4; ++leg) {
    for (int j = 0; j < 3; ++j) q[3 * leg + j] = nominal[j];
  }
  return q;
}

double QuadrupedSpec::standing_height() const {
  // foot height below the hip axis for the (hip, knee) nominal angles; the
  // abduction angle tilts the leg plane about x.
  const double hip = nominal[1];
  const double knee = nominal[2];
  const double below_hip = thigh_length * std::cos(hip) + shank_length * std::cos(hip + knee);
  return below_hip * std::cos(nominal[0]) - hip_offset.z();
}

void QuadrupedSpec::validate() const {
  if (!(base_mass > 0.0)) throw ConfigError("quadruped.base.mass", "must be positive");
  if ((base_size.array() <= 0.0).any()) throw ConfigError("quadruped.base.size", "must be positive");
  if (!(thigh_length > 0.0 && shank_length > 0.0 && abad_length >= 0.0))
    throw ConfigError("quadruped.thigh_length", "leg lengths must be positive");
  for (double m : link_masses) {
    if (!(m > 0.0)) throw ConfigError("quadruped.link_masses", "must be positive");
  }
  for (int j = 0; j < 3; ++j) {
    if (!(limits[j][0] < limits[j][1])) throw ConfigError("quadruped.limits", "limits must be ordered");
    if (nominal[j] < limits[j][0] || nominal[j] > limits[j][1])
      throw ConfigError("quadruped.nominal", "nominal pose outside joint limits");
  }
  if (!(torque_limit > 0.0)) throw ConfigError("quadruped.torque_limit", "must be positive");
  if (!(standing_height() > 0.0))
    throw ConfigError("quadruped.nominal", "nominal pose must put the feet below the base");
}

std::vector<double> TailSpec::length_proportional_masses(const std::vector<double>& lengths,
                                                         double tip_share) {
  std::vector<double> out(lengths.size());
  const double total = fraction_sum(lengths);
  for (std::size_t i = 0; i < lengths.size(); ++i) out[i] = (1.0 - tip_share) * lengths[i] / total;
  if (!out.empty()) out.back() += tip_share;
  return out;
}

VecX TailSpec::nominal_joints() const {
  return Eigen::Map<const VecX>(nominal.data(), static_cast<Eigen::Index>(nominal.size()));
}

void TailSpec::validate() const {
  if (!(total_length > 0.0)) throw ConfigError("tail.total_length", "must be positive");
  if (!(total_mass > 0.0)) throw ConfigError("tail.total_mass", "must be positive");
  auto check_size = [](std::size_t n, const char* field) {
    if (n != kJoints) throw ConfigError(field, "expected 6 entries");
  };
  check_size(length_fractions.size(), "tail.link_length_fractions");
  check_size(mass_fractions.size(), "tail.link_mass_fractions");
  check_size(axes.size(), "tail.axes");
  check_size(limits.size(), "tail.limits");
  check_size(nominal.size(), "tail.nominal");
  if (std::abs(fraction_sum(length_fractions) - 1.0) > 1e-9)
    throw ConfigError("tail.link_length_fractions", "must sum to 1");
  if (std::abs(fraction_sum(mass_fractions) - 1.0) > 1e-9)
    throw ConfigError("tail.link_mass_fractions", "must sum to 1");
  for (int i = 0; i < kJoints; ++i) {
    if (!(length_fractions[i] > 0.0 && mass_fractions[i] > 0.0))
      throw ConfigError("tail.link_length_fractions", "fractions must be positive");
    if (std::abs(axes[i].norm() - 1.0) > 1e-9) throw ConfigError("tail.axes", "axes must be unit vectors");
    if (!(limits[i][0] < limits[i][1])) throw ConfigError("tail.limits", "limits must be ordered");
    if (nominal[i] < limits[i][0] || nominal[i] > limits[i][1])
      throw ConfigError("tail.nominal", "nominal pose outside joint limits");
  }
  if (!(tip_mass_fraction >= 0.0 && tip_mass_fraction < 1.0))
    throw ConfigError("tail.tip_mass_fraction", "must lie in [0, 1)");
  if (!(link_radius > 0.0 && tip_radius > 0.0)) throw ConfigError("tail.link_radius", "must be positive");
  if (!(torque_limit > 0.0)) throw ConfigError("tail.torque_limit", "must be positive");
}

std::string to_string(TailVariant variant) {
  switch (variant) {
    case TailVariant::kNone: return "none";
    case TailVariant::kWidowX250S: return "widowx250s";
    case TailVariant::kViperX300S: return "viperx300s";
  }
  return "none";
}

TailVariant parse_tail_variant(const std::string& name) {
  if (name == "none") return TailVariant::kNone;
  if (name == "widowx250s") return TailVariant::kWidowX250S;
  if (name == "viperx300s") return TailVariant::kViperX300S;
  throw ConfigError("robot.tail", "unknown tail variant '" + name + "'");
}

QuadrupedSpec quadruped_from_config(const YAML::Node& root) {
  const YAML::Node q = root["quadruped"];
  if (!q) throw ConfigError("quadruped", "missing section");
  QuadrupedSpec s;
  s.name = read_or<std::string>(q, "name", s.name);
  s.base_mass = read_or<double>(q, "base.mass", s.base_mass);
  s.base_size = read_vec3(q, "base.size", s.base_size);
  s.hip_offset = read_vec3(q, "hip_offset", s.hip_offset);
  s.abad_length = read_or<double>(q, "abad_length", s.abad_length);
  s.thigh_length = read_or<double>(q, "thigh_length", s.thigh_length);
  s.shank_length = read_or<double>(q, "shank_length", s.shank_length);
  s.link_radius = read_or<double>(q, "link_radius", s.link_radius);
  s.torque_limit = read_or<double>(q, "torque_limit", s.torque_limit);
  s.tail_mount = read_vec3(q, "tail_mount", s.tail_mount);
  if (q["link_masses"]) {
    const auto m = read_or<std::vector<double>>(q, "link_masses", {});
    if (m.size() != 3) throw ConfigError("quadruped.link_masses", "expected 3 numbers");
    s.link_masses = {m[0], m[1], m[2]};
  }
  if (q["nominal"]) {
    const auto m = read_or<std::vector<double>>(q, "nominal", {});
    if (m.size() != 3) throw ConfigError("quadruped.nominal", "expected 3 numbers");
    s.nominal = {m[0], m[1], m[2]};
  }
  const char* names[3] = {"abad", "hip", "knee"};
  for (int j = 0; j < 3; ++j) {
    const YAML::Node n = lookup(q, std::string("limits.") + names[j]);
    if (n.IsDefined()) s.limits[j] = read_pair(n, std::string("quadruped.limits.") + names[j]);
  }
  s.validate();
  return s;
}

TailSpec tail_from_config(const YAML::Node& root) {
  const YAML::Node t = root["tail"];
  if (!t) throw ConfigError("tail", "missing section");
  TailSpec s;
  s.name = read_required<std::string>(t, "name");
  s.total_length = read_required<double>(t, "total_length");
  s.total_mass = read_required<double>(t, "total_mass");
  s.length_fractions = read_required<std::vector<double>>(t, "link_length_fractions");
  s.tip_mass_fraction = read_or<double>(t, "tip_mass_fraction", s.tip_mass_fraction);
  if (t["link_mass_fractions"]) {
    s.mass_fractions = read_required<std::vector<double>>(t, "link_mass_fractions");
  } else {
    s.mass_fractions = TailSpec::length_proportional_masses(
        s.length_fractions, s.tip_mass_fraction);
  }
  s.link_radius = read_or<double>(t, "link_radius", s.link_radius);
  s.tip_radius = read_or<double>(t, "tip_radius", s.tip_radius);
  s.torque_limit = read_or<double>(t, "torque_limit", s.torque_limit);
  s.nominal = read_required<std::vector<double>>(t, "nominal");
  const YAML::Node axes = t["axes"];
  const YAML::Node limits = t["limits"];
  if (!axes || !axes.IsSequence()) throw ConfigError("tail.axes", "missing list");
  if (!limits || !limits.IsSequence()) throw ConfigError("tail.limits", "missing list");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto a = axes[i].as<std::vector<double>>();
    if (a.size() != 3) throw ConfigError("tail.axes", "expected 3 numbers per axis");
    s.axes.emplace_back(a[0], a[1], a[2]);
  }
  for (std::size_t i = 0; i < limits.size(); ++i) {
    s.limits.push_back(read_pair(limits[i], "tail.limits"));
  }
  s.validate();
  return s;
}

QuadrupedSpec load_quadruped_spec(const std::filesystem::path& path) {
  return quadruped_from_config(load_config_file(path));
}

TailSpec load_tail_spec(const std::filesystem::path& path) {
  return tail_from_config(load_config_file(path));
}

std::filesystem::path default_model_dir() {
  return std::filesystem::path(QUADTAIL_SOURCE_DIR) / "configs" / "models";
}

}  // namespace quadtail
