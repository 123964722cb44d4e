#include "quadtail/envs/commands.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

TurnSchedule issue_turn_command(int stage, const CurriculumState& curriculum, Rng& rng,
                                const TurnCommandConfig& config) {
  if (stage != 1 && stage != 2) throw PreconditionError("turning stage must be 1 or 2");
  TurnSchedule s;
  const double magnitude = uniform(rng, 0.0, config.max_turn);
  s.turn_angle = uniform01(rng) < 0.5 ? -magnitude : magnitude;
  if (stage == 1) {
    s.speed = uniform(rng, config.stage1_min_speed_fraction * curriculum.velocity, curriculum.velocity);
    s.onset_time = 0.0;
    s.duration = config.stage1_duration;
  } else {
    s.speed = curriculum.velocity;
    const auto width = static_cast<double>(curriculum.command_range);
    const auto k = static_cast<long long>(std::floor(uniform01(rng) * width));
    s.onset_time = config.warmup + static_cast<double>(k) * config.control_dt;
    s.duration = config.warmup + width * config.control_dt + config.post_turn;
  }
  return s;
}

Command command_at(const TurnSchedule& schedule, double t) {
  Command c;
  c.vx = schedule.speed;
  c.vy = 0.0;
  c.turn_delta = schedule.turn_angle;
  // tolerate round-off in accumulated time
  const bool turned = t >= schedule.onset_time - 1e-9;
  c.section = turned ? TurnSection::kTurn : TurnSection::kRun;
  c.heading = schedule.initial_heading + (turned ? schedule.turn_angle : 0.0);
  return c;
}

void DisturbanceSpec::validate() const {
  if (!(magnitude >= 0.0)) throw ConfigError("disturbance.magnitude", "must be >= 0");
  if (!(window > 0.0)) throw ConfigError("disturbance.window", "must be positive");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw ConfigError("disturbance.direction", "must be a unit vector");
}

Vec3 DisturbanceSpec::force_at(double t) const {
  if (magnitude == 0.0 || t < onset || t >= onset + window) return Vec3::Zero();
  return (magnitude / window) * direction;
}

DisturbanceSpec sample_disturbance(Rng& rng, const DisturbanceConfig& config) {
  DisturbanceSpec d;
  d.magnitude = uniform(rng, config.min_impulse, config.max_impulse);
  Vec3 v;
  do {
    v = Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  } while (v.norm() < 1e-9);
  d.direction = v.normalized();
  d.window = config.window;
  d.onset = uniform(rng, config.earliest_onset, config.latest_onset);
  return d;
}

}  // namespace quadtail
