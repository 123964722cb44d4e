#include "quadtail/rewards/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

Vec3 Command::heading_vector() const { return {std::cos(heading), std::sin(heading), 0.0}; }

void RewardBreakdown::compose(double reward_factor) {
  if (task == RewardTask::kTurning) {
    r_pos = r_v + r_phi + r_w + r_air;
    r_neg = r_cl + r_base + r_ori + r_arm + general.sum();
  } else {
    r_pos = r_ori + r_v + r_w + r_h;
    r_neg = r_cl + r_arm + general.sum();
  }
  total = compose_total(r_pos, r_neg, reward_factor);
}

const std::vector<std::string>& RewardBreakdown::term_names() {
  static const std::vector<std::string> names = {
      "r_p",  "r_pdot", "r_tau", "r_s",   "r_v",   "r_phi", "r_w",   "r_air",
      "r_h",  "r_cl",   "r_base", "r_ori", "r_arm", "r_pos", "r_neg", "total"};
  return names;
}

std::vector<double> RewardBreakdown::term_values() const {
  return {general.r_p, general.r_pdot, general.r_tau, general.r_s, r_v,   r_phi, r_w,   r_air,
          r_h,         r_cl,           r_base,        r_ori,       r_arm, r_pos, r_neg, total};
}

double compose_total(double r_pos, double r_neg, double reward_factor) {
  return r_pos * std::exp(reward_factor * r_neg);
}

GeneralTerms general_constraint_reward(const VecX& joint_positions, const VecX& joint_velocities,
                                       const VecX& torques, const VecX& q_des,
                                       const VecX& q_des_prev, const VecX& q_nominal,
                                       const GeneralCoefficients& k) {
  const auto n = joint_positions.size();
  if (joint_velocities.size() != n || torques.size() != n || q_des.size() != n ||
      q_des_prev.size() != n || q_nominal.size() != n)
    throw PreconditionError("general_constraint_reward: size mismatch");
  GeneralTerms t;
  t.r_p = k.k_p * (joint_positions - q_nominal).squaredNorm();
  t.r_pdot = k.k_pdot * joint_velocities.squaredNorm();
  t.r_tau = k.k_tau * torques.squaredNorm();
  t.r_s = k.k_s * (q_des - q_des_prev).squaredNorm();
  return t;
}

double heading_error(const Mat3& base_rotation, double heading) {
  const Vec3 x = base_rotation.col(0);
  const double px = x.x();
  const double py = x.y();
  if (std::hypot(px, py) < 1e-9) return 0.5 * kPi;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return std::abs(std::atan2(c * py - s * px, c * px + s * py));
}

double tilt_angle(const Mat3& base_rotation) {
  const Vec3 z = base_rotation.col(2);
  return std::atan2(std::hypot(z.x(), z.y()), z.z());
}

double tilt_closing_rate(const Mat3& base_rotation, const Vec3& angular_velocity_world) {
  const Vec3 z = base_rotation.col(2);
  const double s = std::hypot(z.x(), z.y());
  if (s < 1e-9) return 0.0;
  // cos(theta) = z_z, so -sin(theta) dtheta/dt = d(z_z)/dt = (w x z)_z
  return angular_velocity_world.cross(z).z() / s;
}

double airtime_term(double stance_time, double air_time, double k_air, double limit,
                    double floor) {
  const double t_max = std::max(stance_time, air_time);
  if (!(t_max < limit)) return 0.0;
  return k_air * std::max({stance_time, air_time, floor});
}

double clearance_term(const std::vector<double>& foot_heights, const std::vector<bool>& contact,
                      double threshold, double k_cl) {
  if (foot_heights.size() != contact.size())
    throw PreconditionError("clearance_term: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < foot_heights.size(); ++i) {
    if (contact[i]) continue;
    const double d = foot_heights[i] - threshold;
    sum += d * d;
  }
  return k_cl * sum;
}

double arm_term(const VecX& arm_positions, const VecX& arm_nominal, double k_arm) {
  if (arm_positions.size() != arm_nominal.size()) throw PreconditionError("arm_term: size mismatch");
  if (arm_positions.size() == 0) return 0.0;
  return k_arm * (arm_positions - arm_nominal).squaredNorm();
}

void turning_reward(const RewardSignals& s, const Command& command,
                    const FootContactTracker& tracker, const RewardCoefficients& k,
                    RewardBreakdown& out) {
  const TurningCoefficients& c = command.section == TurnSection::kRun ? k.run : k.turn;
  out.task = RewardTask::kTurning;

  const Vec3 h = command.heading_vector();
  const Vec3 lateral(-h.y(), h.x(), 0.0);
  const double vx = s.base_linear_velocity.dot(h);
  const double vy = s.base_linear_velocity.dot(lateral);
  const double ex = command.vx - vx;
  const double ey = command.vy - vy;
  out.r_v = c.k_v * std::exp(-ex * ex - ey * ey);
  out.r_phi = c.k_phi * std::exp(-2.5 * heading_error(s.base_rotation, command.heading));

  const double sign = command.turn_delta < 0.0 ? -1.0 : 1.0;
  const double w = std::max(0.0, sign * s.base_angular_velocity.z());
  out.r_w = c.k_w * (3.0 - 12.0 * std::exp(-0.5 * w));

  out.r_air = 0.0;
  for (const FootPhase& f : tracker.feet())
    out.r_air += airtime_term(f.stance_time, f.air_time, c.k_air, k.airtime_limit, k.airtime_floor);

  out.r_cl = clearance_term(s.foot_heights, s.foot_contact, k.foot_clearance_threshold, c.k_cl);
  out.r_base = c.k_base * s.base_linear_velocity.z() * s.base_linear_velocity.z();
  const double tilt = tilt_angle(s.base_rotation);
  out.r_ori = c.k_ori * tilt * tilt;
  out.r_arm = arm_term(s.arm_positions, s.arm_nominal, c.k_arm);
  out.r_h = 0.0;
}

void reorient_reward(const RewardSignals& s, ReorientRegion region, double nominal_height,
                     const RewardCoefficients& k, RewardBreakdown& out) {
  const ReorientCoefficients& c = region == ReorientRegion::kAir ? k.air : k.ground;
  out.task = RewardTask::kReorientation;

  const double tilt = tilt_angle(s.base_rotation);
  out.r_ori = c.k_ori * std::exp(-2.5 * tilt * tilt);
  const double vxy2 = s.base_linear_velocity.head<2>().squaredNorm();
  out.r_v = c.k_v * std::exp(-5.0 * vxy2);
  out.r_h = c.k_h * std::exp(-10.0 * std::abs(nominal_height - s.base_position.z()));
  out.r_w = c.k_w == 0.0
                ? 0.0
                : c.k_w * (3.0 - 12.0 * std::exp(-0.5 * std::max(
                                                  0.0, tilt_closing_rate(s.base_rotation,
                                                                         s.base_angular_velocity))));
  out.r_cl = clearance_term(s.foot_heights, s.foot_contact, k.foot_clearance_threshold, c.k_cl);
  out.r_arm = arm_term(s.arm_positions, s.arm_nominal, c.k_arm);
  out.r_phi = 0.0;
  out.r_air = 0.0;
  out.r_base = 0.0;
}

}  // namespace quadtail
