#include "quadtail/envs/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "quadtail/common/csv.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

Vec3 roll_pitch_yaw(const Mat3& r) {
  return Vec3(std::atan2(r(2, 1), r(2, 2)), std::asin(std::clamp(-r(2, 0), -1.0, 1.0)),
              std::atan2(r(1, 0), r(0, 0)));
}

EpisodeRow snapshot(const Environment& env, double reward, ReorientRegion region) {
  const SimState& s = env.state();
  const Mat3 r = s.base_orientation.rotation_matrix();
  EpisodeRow row;
  row.time = s.time;
  row.position = s.base_position;
  row.rpy = roll_pitch_yaw(r);
  row.tilt = tilt_angle(r);
  row.linear_velocity = s.base_linear_velocity;
  row.command = env.command();
  row.region = region;
  row.reward = reward;
  row.contact = env.tracker().contact_flags();
  return row;
}

}  // namespace

EpisodeLog run_episode(Environment& env, const ActorCritic& policy, Rng& rng,
                       const CurriculumState& curriculum, const ResetOverrides& overrides) {
  EpisodeLog log;
  VecX obs = env.reset(rng, curriculum, overrides);
  log.initial = snapshot(env, 0.0, region_for_height(env.state().base_position.z()));
  StepInfo info;
  while (!env.done()) {
    obs = env.step(policy.action_mean(obs).col(0), info);
    log.rows.push_back(snapshot(env, info.reward.total, info.region));
    log.episode_return += info.reward.total;
  }
  log.end = info.end;
  log.reason = info.reason;
  return log;
}

void write_episode_csv(const std::filesystem::path& path, const EpisodeLog& log) {
  std::vector<std::string> header{"time", "x", "y", "z", "roll", "pitch", "yaw", "tilt",
                                  "vx", "vy", "vz", "cmd_vx", "cmd_vy", "cmd_heading",
                                  "section", "region", "reward"};
  const std::size_t feet = log.initial.contact.size();
  for (std::size_t k = 0; k < feet; ++k) header.push_back("contact_" + std::to_string(k));
  CsvWriter w(path, header);
  auto emit = [&](const EpisodeRow& r) {
    std::vector<CsvCell> cells{r.time, r.position.x(), r.position.y(), r.position.z(),
                               r.rpy.x(), r.rpy.y(), r.rpy.z(), r.tilt,
                               r.linear_velocity.x(), r.linear_velocity.y(), r.linear_velocity.z(),
                               r.command.vx, r.command.vy, r.command.heading,
                               std::string(r.command.section == TurnSection::kRun ? "run" : "turn"),
                               std::string(r.region == ReorientRegion::kAir ? "air" : "ground"),
                               r.reward};
    for (std::size_t k = 0; k < feet; ++k) cells.emplace_back(static_cast<long long>(r.contact[k]));
    w.row(cells);
  };
  emit(log.initial);
  for (const auto& r : log.rows) emit(r);
}

std::vector<TrajectoryDot> trajectory_dots(const EpisodeLog& log, double interval) {
  if (!(interval > 0.0)) throw PreconditionError("dot interval must be positive");
  std::vector<TrajectoryDot> dots{{log.initial.time, log.initial.position.x(), log.initial.position.y()}};
  long long next = 1;
  for (const auto& r : log.rows) {
    if (r.time + 1e-9 >= static_cast<double>(next) * interval) {
      dots.push_back({r.time, r.position.x(), r.position.y()});
      ++next;
    }
  }
  return dots;
}

TurningMetrics turning_metrics(const EpisodeLog& log, const TurnSchedule& schedule,
                               double heading_tolerance) {
  TurningMetrics m;
  m.speed = schedule.speed;
  m.turn_angle = schedule.turn_angle;
  m.onset_time = schedule.onset_time;
  m.survived = log.survived();
  const double target = schedule.initial_heading + schedule.turn_angle;
  const Vec3 dir(std::cos(target), std::sin(target), 0.0);
  std::optional<Vec3> origin;
  if (schedule.onset_time <= log.initial.time + 1e-9) origin = log.initial.position;
  for (const auto& r : log.rows) {
    if (r.time + 1e-9 < schedule.onset_time) continue;
    if (!origin) origin = r.position;
    Vec3 d = r.position - *origin;
    d.z() = 0.0;
    const double along = d.dot(dir);
    const double dist = along >= 0.0 ? (d - along * dir).norm() : d.norm();
    m.peak_lateral_displacement = std::max(m.peak_lateral_displacement, dist);
    const double yaw_error = std::abs(std::remainder(r.rpy.z() - target, 2.0 * kPi));
    if (m.completion_time < 0.0 && yaw_error <= heading_tolerance)
      m.completion_time = r.time - schedule.onset_time;
  }
  return m;
}

ReorientMetrics reorient_metrics(const EpisodeLog& log, double window) {
  ReorientMetrics m;
  m.drop_height = log.initial.position.z();
  m.initial_tilt = log.initial.tilt;
  m.min_aerial_tilt = log.initial.tilt;
  double min_in_window = log.initial.tilt;
  for (const auto& r : log.rows) {
    if (r.region == ReorientRegion::kAir) {
      m.min_aerial_tilt = std::min(m.min_aerial_tilt, r.tilt);
      if (r.time <= window + 1e-9) min_in_window = std::min(min_in_window, r.tilt);
    }
    if (m.touchdown_time < 0.0 && std::any_of(r.contact.begin(), r.contact.end(), [](bool c) { return c; })) {
      m.touchdown_time = r.time;
      m.tilt_at_touchdown = r.tilt;
    }
  }
  m.achieved_rotation = m.initial_tilt - m.min_aerial_tilt;
  m.window_rotation = m.initial_tilt - min_in_window;
  m.landed = log.survived();
  return m;
}

std::vector<std::pair<double, double>> tilt_series(const EpisodeLog& log, double horizon) {
  std::vector<std::pair<double, double>> out{{log.initial.time, log.initial.tilt}};
  for (const auto& r : log.rows) {
    if (r.time > horizon + 1e-9) break;
    out.emplace_back(r.time, r.tilt);
  }
  return out;
}

std::vector<ImpulseCell> impulse_grid(Environment& env, const ActorCritic& policy, std::uint64_t seed,
                                      const ImpulseGridSpec& spec) {
  if (env.config().task != Task::kBalancing) throw PreconditionError("impulse grid needs the balancing task");
  std::vector<ImpulseCell> cells;
  const auto curriculum = CurriculumState::initial(CurriculumKind::kNone);
  std::uint64_t index = 0;
  for (double jy : spec.jy) {
    for (double jz : spec.jz) {
      Rng rng(derive_seed(seed, index++));
      ResetOverrides o;
      o.speed = spec.speed;
      const Vec3 j(0.0, jy, jz);
      if (j.norm() > 0.0) {
        DisturbanceSpec d;
        d.magnitude = j.norm();
        d.direction = j.normalized();
        d.window = env.config().disturbance.window;
        d.onset = spec.onset;
        o.disturbance = d;
      } else {
        o.no_disturbance = true;
      }
      const EpisodeLog log = run_episode(env, policy, rng, curriculum, o);
      cells.push_back({jy, jz, log.survived(), log.reason});
    }
  }
  return cells;
}

}  // namespace quadtail
