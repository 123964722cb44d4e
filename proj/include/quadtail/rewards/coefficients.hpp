#pragma once

#include <yaml-cpp/yaml.h>

namespace quadtail {

/// Constraint terms shared by every task, applied to the leg joints.
struct GeneralCoefficients {
  double k_p = -4.0;
  double k_pdot = -0.005;
  double k_tau = -0.002;
  double k_s = -4.0;
};

/// One column of the turning table (run or turn section).
struct TurningCoefficients {
  double k_v = 2.0;
  double k_phi = 4.5;
  double k_w = 0.0;
  double k_air = 0.5;
  double k_cl = -50.0;
  double k_base = -10.0;
  double k_ori = -100.0;
  double k_arm = -15.0;

  static TurningCoefficients run();
  static TurningCoefficients turn();
};

/// One column of the reorientation table (air or ground region). k_w is the
/// optional tilt-rate term and is zero in both default columns.
struct ReorientCoefficients {
  double k_ori = 5.0;
  double k_v = 0.0;
  double k_h = 0.0;
  double k_w = 0.0;
  double k_cl = 0.0;
  double k_arm = 0.0;

  static ReorientCoefficients air();
  static ReorientCoefficients ground();
};

struct RewardCoefficients {
  GeneralCoefficients general;
  TurningCoefficients run = TurningCoefficients::run();
  TurningCoefficients turn = TurningCoefficients::turn();
  ReorientCoefficients air = ReorientCoefficients::air();
  ReorientCoefficients ground = ReorientCoefficients::ground();
  double reward_factor = 0.02;
  double foot_clearance_threshold = 0.09;  // m
  double airtime_limit = 0.25;             // s, T_max gate
  double airtime_floor = 0.2;              // s

  /// Throws ConfigError naming the first coefficient with the wrong sign.
  void validate() const;
};

/// Reads the `rewards:` section, starting from `defaults`. Keys mirror the
/// struct layout: rewards.general.k_p, rewards.run.k_v, rewards.air.k_ori,
/// rewards.reward_factor, ...
RewardCoefficients reward_coefficients_from_config(const YAML::Node& root,
                                                   const RewardCoefficients& defaults = {});

void write_reward_coefficients(YAML::Node& root, const RewardCoefficients& c);

}  // namespace quadtail
