#pragma once

#include <string>
#include <utility>
#include <vector>

#include "quadtail/math/types.hpp"
#include "quadtail/rewards/coefficients.hpp"
#include "quadtail/rewards/contact_tracker.hpp"

namespace quadtail {

enum class TurnSection { kRun, kTurn };
enum class ReorientRegion { kAir, kGround };

/// Body p_z above which the reorientation task is in its air region.
inline constexpr double kAirRegionHeight = 0.4;

inline ReorientRegion region_for_height(double base_z) {
  return base_z > kAirRegionHeight ? ReorientRegion::kAir : ReorientRegion::kGround;
}

/// Velocity/heading command. `vx`, `vy` are expressed in the frame whose
/// x axis is the commanded heading; `turn_delta` is the signed heading
/// change of the active turn and only its sign is used (zero means +).
struct Command {
  double vx = 0.0;
  double vy = 0.0;
  double heading = 0.0;  // world yaw, rad
  double turn_delta = 0.0;
  TurnSection section = TurnSection::kRun;

  Vec3 heading_vector() const;
};

/// Robot quantities the reward terms read, sampled after a control step.
struct RewardSignals {
  Vec3 base_position = Vec3::Zero();
  Mat3 base_rotation = Mat3::Identity();
  Vec3 base_linear_velocity = Vec3::Zero();   // world
  Vec3 base_angular_velocity = Vec3::Zero();  // world
  std::vector<double> foot_heights;
  std::vector<bool> foot_contact;
  VecX arm_positions;  // empty without a tail
  VecX arm_nominal;
};

struct GeneralTerms {
  double r_p = 0.0;
  double r_pdot = 0.0;
  double r_tau = 0.0;
  double r_s = 0.0;

  double sum() const { return r_p + r_pdot + r_tau + r_s; }
};

enum class RewardTask { kTurning, kReorientation };

/// Every term of one step. Unused terms of the other task stay zero. r_ori
/// is a constraint in the turning task and an objective in reorientation.
struct RewardBreakdown {
  RewardTask task = RewardTask::kTurning;
  GeneralTerms general;
  double r_v = 0.0;
  double r_phi = 0.0;
  double r_w = 0.0;
  double r_air = 0.0;
  double r_h = 0.0;
  double r_cl = 0.0;
  double r_base = 0.0;
  double r_ori = 0.0;
  double r_arm = 0.0;
  double r_pos = 0.0;
  double r_neg = 0.0;  // task and general constraint terms
  double total = 0.0;

  /// Recomputes r_pos, r_neg and total from the terms.
  void compose(double reward_factor);

  static const std::vector<std::string>& term_names();
  /// Values in term_names() order.
  std::vector<double> term_values() const;
};

/// (Σ pos) * exp(reward_factor * Σ neg).
double compose_total(double r_pos, double r_neg, double reward_factor);

/// Leg-joint constraint terms. All vectors must have the same size.
GeneralTerms general_constraint_reward(const VecX& joint_positions, const VecX& joint_velocities,
                                       const VecX& torques, const VecX& q_des,
                                       const VecX& q_des_prev, const VecX& q_nominal,
                                       const GeneralCoefficients& k);

/// Planar angle in [0, pi] between the commanded heading and the body x axis
/// projected on the ground plane. A vertical body x axis counts as pi / 2.
double heading_error(const Mat3& base_rotation, double heading);

/// Angle in [0, pi] between the body z axis and world z.
double tilt_angle(const Mat3& base_rotation);

/// Rate at which the tilt angle decreases (positive when turning upright).
double tilt_closing_rate(const Mat3& base_rotation, const Vec3& angular_velocity_world);

double airtime_term(double stance_time, double air_time, double k_air, double limit, double floor);

double clearance_term(const std::vector<double>& foot_heights, const std::vector<bool>& contact,
                      double threshold, double k_cl);

double arm_term(const VecX& arm_positions, const VecX& arm_nominal, double k_arm);

/// Fills the task terms of the turning table; the column follows
/// `command.section`. General terms are left untouched.
void turning_reward(const RewardSignals& s, const Command& command,
                    const FootContactTracker& tracker, const RewardCoefficients& k,
                    RewardBreakdown& out);

/// Fills the task terms of the reorientation table for the given region.
/// `nominal_height` is the standing base height targeted by r_h.
void reorient_reward(const RewardSignals& s, ReorientRegion region, double nominal_height,
                     const RewardCoefficients& k, RewardBreakdown& out);

}  // namespace quadtail
