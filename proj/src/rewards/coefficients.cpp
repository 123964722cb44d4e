#include "quadtail/rewards/coefficients.hpp"

#include <string>
#include <utility>
#include <vector>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

struct Field {
  std::string key;
  double* value;
  int sign;  // +1 objective, -1 constraint
};

std::vector<Field> fields(RewardCoefficients& c) {
  std::vector<Field> out = {
      {"general.k_p", &c.general.k_p, -1},
      {"general.k_pdot", &c.general.k_pdot, -1},
      {"general.k_tau", &c.general.k_tau, -1},
      {"general.k_s", &c.general.k_s, -1},
  };
  for (auto [name, col] : {std::pair<std::string, TurningCoefficients*>{"run", &c.run},
                           std::pair<std::string, TurningCoefficients*>{"turn", &c.turn}}) {
    out.push_back({name + ".k_v", &col->k_v, 1});
    out.push_back({name + ".k_phi", &col->k_phi, 1});
    out.push_back({name + ".k_w", &col->k_w, 1});
    out.push_back({name + ".k_air", &col->k_air, 1});
    out.push_back({name + ".k_cl", &col->k_cl, -1});
    out.push_back({name + ".k_base", &col->k_base, -1});
    out.push_back({name + ".k_ori", &col->k_ori, -1});
    out.push_back({name + ".k_arm", &col->k_arm, -1});
  }
  for (auto [name, col] : {std::pair<std::string, ReorientCoefficients*>{"air", &c.air},
                           std::pair<std::string, ReorientCoefficients*>{"ground", &c.ground}}) {
    out.push_back({name + ".k_ori", &col->k_ori, 1});
    out.push_back({name + ".k_v", &col->k_v, 1});
    out.push_back({name + ".k_h", &col->k_h, 1});
    out.push_back({name + ".k_w", &col->k_w, 1});
    out.push_back({name + ".k_cl", &col->k_cl, -1});
    out.push_back({name + ".k_arm", &col->k_arm, -1});
  }
  return out;
}

}  // namespace

TurningCoefficients TurningCoefficients::run() { return {}; }

TurningCoefficients TurningCoefficients::turn() {
  TurningCoefficients c;
  c.k_w = 3.0;
  c.k_ori = 0.0;
  c.k_arm = 0.0;
  return c;
}

ReorientCoefficients ReorientCoefficients::air() { return {}; }

ReorientCoefficients ReorientCoefficients::ground() {
  ReorientCoefficients c;
  c.k_v = 2.5;
  c.k_h = 5.0;
  c.k_cl = -100.0;
  c.k_arm = -150.0;
  return c;
}

void RewardCoefficients::validate() const {
  auto copy = *this;
  for (const Field& f : fields(copy)) {
    if (f.sign > 0 && !(*f.value >= 0.0))
      throw ConfigError("rewards." + f.key, "objective coefficient must be >= 0");
    if (f.sign < 0 && !(*f.value <= 0.0))
      throw ConfigError("rewards." + f.key, "constraint coefficient must be <= 0");
  }
  if (!(reward_factor > 0.0)) throw ConfigError("rewards.reward_factor", "must be positive");
  if (!(foot_clearance_threshold >= 0.0))
    throw ConfigError("rewards.foot_clearance_threshold", "must be >= 0");
  if (!(airtime_limit > 0.0)) throw ConfigError("rewards.airtime_limit", "must be positive");
  if (!(airtime_floor >= 0.0)) throw ConfigError("rewards.airtime_floor", "must be >= 0");
}

RewardCoefficients reward_coefficients_from_config(const YAML::Node& root,
                                                   const RewardCoefficients& defaults) {
  RewardCoefficients c = defaults;
  for (const Field& f : fields(c)) *f.value = read_or<double>(root, "rewards." + f.key, *f.value);
  c.reward_factor = read_or<double>(root, "rewards.reward_factor", c.reward_factor);
  c.foot_clearance_threshold =
      read_or<double>(root, "rewards.foot_clearance_threshold", c.foot_clearance_threshold);
  c.airtime_limit = read_or<double>(root, "rewards.airtime_limit", c.airtime_limit);
  c.airtime_floor = read_or<double>(root, "rewards.airtime_floor", c.airtime_floor);
  c.validate();
  return c;
}

void write_reward_coefficients(YAML::Node& root, const RewardCoefficients& coefficients) {
  RewardCoefficients c = coefficients;
  YAML::Node r = root["rewards"];
  for (const Field& f : fields(c)) {
    const auto dot = f.key.find('.');
    r[f.key.substr(0, dot)][f.key.substr(dot + 1)] = *f.value;
  }
  r["reward_factor"] = c.reward_factor;
  r["foot_clearance_threshold"] = c.foot_clearance_threshold;
  r["airtime_limit"] = c.airtime_limit;
  r["airtime_floor"] = c.airtime_floor;
}

}  // namespace quadtail
