#pragma once

#include <optional>

#include "quadtail/common/random.hpp"
#include "quadtail/curriculum/curriculum.hpp"
#include "quadtail/rewards/rewards.hpp"

namespace quadtail {

struct TurnCommandConfig {
  double max_turn = 135.0 * kPi / 180.0;  // rad
  double warmup = 1.5;                    // s of straight running before the window (stage 2)
  double post_turn = 2.0;                 // s after the latest possible onset
  double stage1_duration = 4.0;           // s
  double control_dt = 0.01;               // s
  double stage1_min_speed_fraction = 0.5;
};

/// One episode of the turning task: straight running along `initial_heading`
/// until `onset_time`, then the heading command jumps by `turn_angle`.
struct TurnSchedule {
  double initial_heading = 0.0;
  double turn_angle = 0.0;  // signed, |.| <= max_turn
  double onset_time = 0.0;
  double speed = 0.0;       // V^cmd_x
  double duration = 0.0;    // episode length, s
};

/// Stage 1: onset at t = 0 from standstill, speed ~ U[f V, V] with V the
/// curriculum velocity. Stage 2: speed = V, onset at warmup plus a whole
/// number of control steps drawn from [0, command_range). Angle magnitude is
/// uniform in [0, max_turn] with a random sign.
TurnSchedule issue_turn_command(int stage, const CurriculumState& curriculum, Rng& rng,
                                const TurnCommandConfig& config);

/// Command in force at time t; the section is run strictly before the onset
/// and turn from the onset on.
Command command_at(const TurnSchedule& schedule, double t);

/// Constant force on the base center of mass for `window` seconds.
struct DisturbanceSpec {
  double magnitude = 0.0;  // N s
  Vec3 direction = Vec3::UnitY();
  double window = 0.2;     // s
  double onset = 1.0;      // s

  void validate() const;
  /// magnitude / window along direction while onset <= t < onset + window.
  Vec3 force_at(double t) const;
};

struct DisturbanceConfig {
  double min_impulse = 50.0;
  double max_impulse = 100.0;
  double window = 0.2;
  double earliest_onset = 1.0;
  double latest_onset = 4.0;
};

/// Magnitude uniform in [min, max], direction uniform on the sphere, onset
/// uniform in [earliest, latest].
DisturbanceSpec sample_disturbance(Rng& rng, const DisturbanceConfig& config);

}  // namespace quadtail
