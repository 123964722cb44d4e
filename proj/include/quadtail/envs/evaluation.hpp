#pragma once

#include <filesystem>
#include <vector>

#include "quadtail/control/policy.hpp"
#include "quadtail/envs/environment.hpp"

namespace quadtail {

/// One logged control step.
struct EpisodeRow {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();  // roll, pitch, yaw
  double tilt = 0.0;        // angle between body z and world z, rad
  Vec3 linear_velocity = Vec3::Zero();
  Command command;
  ReorientRegion region = ReorientRegion::kGround;
  double reward = 0.0;
  std::vector<bool> contact;
};

struct EpisodeLog {
  EpisodeRow initial;  // state right after reset
  std::vector<EpisodeRow> rows;
  EpisodeEnd end = EpisodeEnd::kNone;
  TerminationReason reason = TerminationReason::kNone;
  double episode_return = 0.0;

  bool survived() const { return end == EpisodeEnd::kTruncated; }
};

/// Resets with `overrides` and runs the policy mean until the episode ends.
EpisodeLog run_episode(Environment& env, const ActorCritic& policy, Rng& rng,
                       const CurriculumState& curriculum, const ResetOverrides& overrides = {});

/// Per-step CSV; columns are listed in docs/formats.md.
void write_episode_csv(const std::filesystem::path& path, const EpisodeLog& log);

/// Planar position sampled every `interval` seconds, starting at t = 0.
struct TrajectoryDot {
  double time;
  double x;
  double y;
};
std::vector<TrajectoryDot> trajectory_dots(const EpisodeLog& log, double interval = 0.05);

struct TurningMetrics {
  double speed = 0.0;
  double turn_angle = 0.0;
  double onset_time = 0.0;
  /// Largest distance from the ideal path, which turns instantly at the
  /// onset position; measured after the onset.
  double peak_lateral_displacement = 0.0;
  /// Time from onset until the heading first comes within the tolerance of
  /// the command; negative when it never does.
  double completion_time = -1.0;
  bool survived = false;
};

TurningMetrics turning_metrics(const EpisodeLog& log, const TurnSchedule& schedule,
                               double heading_tolerance = 10.0 * kPi / 180.0);

struct ReorientMetrics {
  double drop_height = 0.0;
  double initial_tilt = 0.0;
  /// Smallest tilt while the base is above the air/ground split.
  double min_aerial_tilt = 0.0;
  double achieved_rotation = 0.0;  // initial_tilt - min_aerial_tilt
  /// Same, counting only rows with time <= window.
  double window_rotation = 0.0;
  double touchdown_time = -1.0;    // first foot contact, -1 if none
  double tilt_at_touchdown = 0.0;
  bool landed = false;  // episode ran to its limit without termination
};

ReorientMetrics reorient_metrics(const EpisodeLog& log, double window = 0.5);

/// Rows of (time, tilt) with time <= horizon, starting with the reset state.
std::vector<std::pair<double, double>> tilt_series(const EpisodeLog& log, double horizon = 0.5);

struct ImpulseCell {
  double jy = 0.0;
  double jz = 0.0;
  bool survived = false;
  TerminationReason reason = TerminationReason::kNone;
};

struct ImpulseGridSpec {
  std::vector<double> jy{0.0, 25.0, 50.0, 75.0, 100.0};
  std::vector<double> jz{-100.0, -50.0, 0.0, 50.0, 100.0};
  double speed = 1.0;
  double onset = 2.0;
};

/// Balancing episodes at a fixed speed with the impulse (0, J_y, J_z)
/// applied at `onset`; one cell per pair.
std::vector<ImpulseCell> impulse_grid(Environment& env, const ActorCritic& policy, std::uint64_t seed,
                                      const ImpulseGridSpec& spec = {});

}  // namespace quadtail
