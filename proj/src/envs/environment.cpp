#include "quadtail/envs/environment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

constexpr int kLegJoints = 12;

bool state_finite(const SimState& s) {
  return s.base_position.allFinite() && s.base_linear_velocity.allFinite() &&
         s.base_angular_velocity.allFinite() && s.joint_positions.allFinite() &&
         s.joint_velocities.allFinite() && std::isfinite(s.base_orientation.w());
}

// degrees for config files, without the radian round-trip noise
double config_degrees(double rad) { return std::round(rad_to_deg(rad) * 1e9) / 1e9; }

std::string describe(const SimState& s) {
  std::ostringstream os;
  os << "t=" << s.time << " base_position=(" << s.base_position.transpose() << ") base_velocity=("
     << s.base_linear_velocity.transpose() << ") max|qd|=" << s.joint_velocities.cwiseAbs().maxCoeff();
  return os.str();
}

}  // namespace

const char* to_string(Task t) {
  switch (t) {
    case Task::kTurning: return "turning";
    case Task::kReorientation: return "reorientation";
    case Task::kBalancing: return "balancing";
  }
  return "turning";
}

Task parse_task(const std::string& name) {
  if (name == "turning") return Task::kTurning;
  if (name == "reorientation") return Task::kReorientation;
  if (name == "balancing") return Task::kBalancing;
  throw ConfigError("task", "expected turning, reorientation or balancing");
}

void EnvConfig::validate() const {
  if (task == Task::kTurning && stage != 1 && stage != 2) throw ConfigError("env.stage", "must be 1 or 2");
  if (!(physics_dt > 0.0)) throw ConfigError("env.physics_dt", "must be positive");
  if (substeps <= 0) throw ConfigError("env.substeps", "must be positive");
  if (!(action_scale > 0.0)) throw ConfigError("env.action_scale", "must be positive");
  gains.validate();
  contact.validate();
  rewards.validate();
  termination.validate();
  if (!(joint_noise >= 0.0)) throw ConfigError("env.joint_noise", "must be >= 0");
  if (!(drop_min_height > kAirRegionHeight && drop_min_height <= drop_max_height))
    throw ConfigError("env.drop_min_height", "need 0.4 < min <= max");
  if (!(drop_min_tilt >= 0.0 && drop_min_tilt <= drop_max_tilt && drop_max_tilt <= kPi))
    throw ConfigError("env.drop_min_tilt_deg", "need 0 <= min <= max <= 180");
  if (!(reorient_duration > 0.0)) throw ConfigError("env.reorient_duration", "must be positive");
  if (!(balance_min_speed >= 0.0 && balance_min_speed <= balance_max_speed))
    throw ConfigError("env.balance_min_speed", "need 0 <= min <= max");
  if (!(balance_duration > 0.0)) throw ConfigError("env.balance_duration", "must be positive");
  if (!(disturbance.min_impulse >= 0.0 && disturbance.min_impulse <= disturbance.max_impulse))
    throw ConfigError("env.disturbance.min_impulse", "need 0 <= min <= max");
  if (!(disturbance.window > 0.0)) throw ConfigError("env.disturbance.window", "must be positive");
  if (!(turn.max_turn >= 0.0 && turn.max_turn <= kPi)) throw ConfigError("env.turn.max_turn_deg", "must be in [0, 180]");
}

EnvConfig env_config_from_config(const YAML::Node& root, const EnvConfig& d) {
  EnvConfig c = d;
  if (lookup(root, "task").IsDefined()) c.task = parse_task(read_required<std::string>(root, "task"));
  c.stage = read_or(root, "stage", c.stage);
  c.physics_dt = read_or(root, "env.physics_dt", c.physics_dt);
  c.substeps = read_or(root, "env.substeps", c.substeps);
  c.action_scale = read_or(root, "env.action_scale", c.action_scale);
  c.gains.kp = read_or(root, "env.kp", c.gains.kp);
  c.gains.kd = read_or(root, "env.kd", c.gains.kd);
  c.contact.stiffness = read_or(root, "env.contact.stiffness", c.contact.stiffness);
  c.contact.damping = read_or(root, "env.contact.damping", c.contact.damping);
  c.contact.friction = read_or(root, "env.contact.friction", c.contact.friction);
  c.contact.regularization_velocity =
      read_or(root, "env.contact.regularization_velocity", c.contact.regularization_velocity);
  c.joint_noise = read_or(root, "env.joint_noise", c.joint_noise);
  c.drop_min_height = read_or(root, "env.drop_min_height", c.drop_min_height);
  c.drop_max_height = read_or(root, "env.drop_max_height", c.drop_max_height);
  c.drop_min_tilt = deg_to_rad(read_or(root, "env.drop_min_tilt_deg", rad_to_deg(c.drop_min_tilt)));
  c.drop_max_tilt = deg_to_rad(read_or(root, "env.drop_max_tilt_deg", rad_to_deg(c.drop_max_tilt)));
  c.drop_about_roll = read_or(root, "env.drop_about_roll", c.drop_about_roll);
  c.aerial_only = read_or(root, "env.aerial_only", c.aerial_only);
  c.reorient_duration = read_or(root, "env.reorient_duration", c.reorient_duration);
  c.balance_min_speed = read_or(root, "env.balance_min_speed", c.balance_min_speed);
  c.balance_max_speed = read_or(root, "env.balance_max_speed", c.balance_max_speed);
  c.balance_duration = read_or(root, "env.balance_duration", c.balance_duration);
  c.turn.max_turn = deg_to_rad(read_or(root, "env.turn.max_turn_deg", rad_to_deg(c.turn.max_turn)));
  c.turn.warmup = read_or(root, "env.turn.warmup", c.turn.warmup);
  c.turn.post_turn = read_or(root, "env.turn.post_turn", c.turn.post_turn);
  c.turn.stage1_duration = read_or(root, "env.turn.stage1_duration", c.turn.stage1_duration);
  c.turn.stage1_min_speed_fraction =
      read_or(root, "env.turn.stage1_min_speed_fraction", c.turn.stage1_min_speed_fraction);
  c.turn.control_dt = c.control_dt();
  c.disturbance.min_impulse = read_or(root, "env.disturbance.min_impulse", c.disturbance.min_impulse);
  c.disturbance.max_impulse = read_or(root, "env.disturbance.max_impulse", c.disturbance.max_impulse);
  c.disturbance.window = read_or(root, "env.disturbance.window", c.disturbance.window);
  c.disturbance.earliest_onset = read_or(root, "env.disturbance.earliest_onset", c.disturbance.earliest_onset);
  c.disturbance.latest_onset = read_or(root, "env.disturbance.latest_onset", c.disturbance.latest_onset);
  c.termination.body_collision = read_or(root, "termination.body_collision", c.termination.body_collision);
  c.termination.smoothness_limit = read_or(root, "termination.smoothness_limit", c.termination.smoothness_limit);
  c.termination.torque_limit = read_or(root, "termination.torque_limit", c.termination.torque_limit);
  c.termination.joint_limit = read_or(root, "termination.joint_limit", c.termination.joint_limit);
  c.termination.penalty = read_or(root, "termination.penalty", c.termination.penalty);
  c.rewards = reward_coefficients_from_config(root, c.rewards);
  c.validate();
  return c;
}

void write_env_config(YAML::Node& root, const EnvConfig& c) {
  root["task"] = to_string(c.task);
  root["stage"] = c.stage;
  YAML::Node e = root["env"];
  e["physics_dt"] = c.physics_dt;
  e["substeps"] = c.substeps;
  e["action_scale"] = c.action_scale;
  e["kp"] = c.gains.kp;
  e["kd"] = c.gains.kd;
  e["contact"]["stiffness"] = c.contact.stiffness;
  e["contact"]["damping"] = c.contact.damping;
  e["contact"]["friction"] = c.contact.friction;
  e["contact"]["regularization_velocity"] = c.contact.regularization_velocity;
  e["joint_noise"] = c.joint_noise;
  e["drop_min_height"] = c.drop_min_height;
  e["drop_max_height"] = c.drop_max_height;
  e["drop_min_tilt_deg"] = config_degrees(c.drop_min_tilt);
  e["drop_max_tilt_deg"] = config_degrees(c.drop_max_tilt);
  e["drop_about_roll"] = c.drop_about_roll;
  e["aerial_only"] = c.aerial_only;
  e["reorient_duration"] = c.reorient_duration;
  e["balance_min_speed"] = c.balance_min_speed;
  e["balance_max_speed"] = c.balance_max_speed;
  e["balance_duration"] = c.balance_duration;
  e["turn"]["max_turn_deg"] = config_degrees(c.turn.max_turn);
  e["turn"]["warmup"] = c.turn.warmup;
  e["turn"]["post_turn"] = c.turn.post_turn;
  e["turn"]["stage1_duration"] = c.turn.stage1_duration;
  e["turn"]["stage1_min_speed_fraction"] = c.turn.stage1_min_speed_fraction;
  e["disturbance"]["min_impulse"] = c.disturbance.min_impulse;
  e["disturbance"]["max_impulse"] = c.disturbance.max_impulse;
  e["disturbance"]["window"] = c.disturbance.window;
  e["disturbance"]["earliest_onset"] = c.disturbance.earliest_onset;
  e["disturbance"]["latest_onset"] = c.disturbance.latest_onset;
  YAML::Node t = root["termination"];
  t["body_collision"] = c.termination.body_collision;
  t["smoothness_limit"] = c.termination.smoothness_limit;
  t["torque_limit"] = c.termination.torque_limit;
  t["joint_limit"] = c.termination.joint_limit;
  t["penalty"] = c.termination.penalty;
  write_reward_coefficients(root, c.rewards);
}

Environment::Environment(std::shared_ptr<const RobotModel> model, const EnvConfig& config)
    : model_(std::move(model)), config_(config), tracker_(4) {
  if (!model_) throw PreconditionError("environment needs a robot model");
  config_.turn.control_dt = config_.control_dt();
  config_.validate();
  layout_ = ObservationLayout{model_->num_joints(), config_.task != Task::kReorientation};
  scaling_ = ActionScaling{config_.action_scale, model_->nominal_joints(), model_->lower_limits(),
                           model_->upper_limits()};
  options_.contact = config_.contact;
  torque_limits_ = model_->torque_limits();
  const VecX nominal = model_->nominal_joints();
  leg_nominal_ = nominal.head(kLegJoints);
  arm_nominal_ = nominal.tail(model_->num_joints() - kLegJoints);
  nominal_height_ = nominal_state(*model_).base_position.z();
  state_ = nominal_state(*model_);
}

VecX Environment::reset(Rng& rng, const CurriculumState& curriculum, const ResetOverrides& o) {
  state_ = nominal_state(*model_);
  const int n = model_->num_joints();
  if (!o.no_joint_noise && config_.joint_noise > 0.0) {
    for (int j = 0; j < n; ++j) state_.joint_positions[j] += uniform(rng, -config_.joint_noise, config_.joint_noise);
    state_.joint_positions =
        state_.joint_positions.cwiseMax(model_->lower_limits()).cwiseMin(model_->upper_limits());
  }
  disturbance_.reset();
  command_ = Command{};
  schedule_ = TurnSchedule{};

  if (config_.task == Task::kReorientation) {
    const double height = o.drop_height.value_or(uniform(rng, config_.drop_min_height, config_.drop_max_height));
    const double tilt = o.drop_tilt.value_or(uniform(rng, config_.drop_min_tilt, config_.drop_max_tilt));
    state_.base_position = Vec3(0.0, 0.0, height);
    // negative pitch about body y lifts the nose
    state_.base_orientation = config_.drop_about_roll
                                  ? UnitQuaternion::from_axis_angle(Vec3::UnitX(), tilt)
                                  : UnitQuaternion::from_axis_angle(Vec3::UnitY(), -tilt);
    duration_ = config_.reorient_duration;
  } else {
    // rest the lowest foot 1 mm into the ground so stance starts in contact
    const Kinematics kin = forward_kinematics(model_->tree, state_);
    const auto heights = kin.foot_heights(model_->tree);
    state_.base_position.z() -= *std::min_element(heights.begin(), heights.end()) + 1e-3;
    if (config_.task == Task::kTurning) {
      schedule_ = issue_turn_command(config_.stage, curriculum, rng, config_.turn);
      if (o.speed) schedule_.speed = *o.speed;
      if (o.turn_angle) schedule_.turn_angle = *o.turn_angle;
      if (o.onset_time) {
        schedule_.onset_time = *o.onset_time;
        schedule_.duration = std::max(schedule_.duration, *o.onset_time + config_.turn.post_turn);
      }
      duration_ = schedule_.duration;
    } else {
      schedule_.speed = o.speed.value_or(uniform(rng, config_.balance_min_speed, config_.balance_max_speed));
      schedule_.onset_time = 1e9;
      duration_ = config_.balance_duration;
      DisturbanceConfig dc = config_.disturbance;
      dc.latest_onset = std::min(dc.latest_onset, duration_ - dc.window);
      dc.earliest_onset = std::min(dc.earliest_onset, dc.latest_onset);
      const DisturbanceSpec sampled = sample_disturbance(rng, dc);
      if (o.disturbance) disturbance_ = *o.disturbance;
      else if (!o.no_disturbance) disturbance_ = sampled;
      if (disturbance_) {
        disturbance_->validate();
        disturbance_first_step_ = std::llround(disturbance_->onset / config_.physics_dt);
        disturbance_last_step_ =
            disturbance_first_step_ + std::llround(disturbance_->window / config_.physics_dt) - 1;
      }
    }
  }

  const Kinematics kin = forward_kinematics(model_->tree, state_);
  const auto heights = kin.foot_heights(model_->tree);
  std::vector<bool> contact(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) contact[i] = heights[i] <= 0.0;
  tracker_.reset(contact);
  history_.reset(state_.joint_positions);
  q_des_prev_ = scaling_.scale(VecX::Zero(n));
  physics_steps_ = 0;
  steps_ = 0;
  done_ = false;
  command_ = command_for_time(0.0);
  return observation();
}

Command Environment::command_for_time(double t) const {
  if (config_.task == Task::kTurning) return command_at(schedule_, t);
  Command c;
  if (config_.task == Task::kBalancing) {
    c.vx = schedule_.speed;
    c.section = TurnSection::kRun;
  }
  return c;
}

std::optional<Command> Environment::observed_command() const {
  if (config_.task == Task::kReorientation) return std::nullopt;
  return command_;
}

VecX Environment::observation() const {
  return build_observation(layout_, state_, history_, observed_command());
}

RewardSignals Environment::reward_signals(const Kinematics& kin, const std::vector<bool>& contact) const {
  RewardSignals s;
  s.base_position = state_.base_position;
  s.base_rotation = state_.base_orientation.rotation_matrix();
  s.base_linear_velocity = state_.base_linear_velocity;
  s.base_angular_velocity = s.base_rotation * state_.base_angular_velocity;
  s.foot_heights = kin.foot_heights(model_->tree);
  s.foot_contact = contact;
  const int arm = model_->num_joints() - kLegJoints;
  s.arm_positions = state_.joint_positions.tail(arm);
  s.arm_nominal = arm_nominal_;
  return s;
}

VecX Environment::step(const VecX& action, StepInfo& info) {
  if (done_) throw PreconditionError("step called on a finished episode; reset first");
  if (action.size() != act_dim()) throw PreconditionError("action dimension mismatch");
  if (!action.allFinite()) throw RuntimeFault("non-finite action at " + describe(state_));

  const VecX q_des = scaling_.scale(action);
  const int n = model_->num_joints();
  VecX torque_sum = VecX::Zero(n);
  VecX damping(n);
  StepDiagnostics diag;
  std::vector<ExternalForce> external;
  for (int k = 0; k < config_.substeps; ++k) {
    const VecX raw = config_.gains.kp * (q_des - state_.joint_positions) - config_.gains.kd * state_.joint_velocities;
    const VecX tau = raw.cwiseMax(-torque_limits_).cwiseMin(torque_limits_);
    for (int j = 0; j < n; ++j) damping[j] = std::abs(raw[j]) < torque_limits_[j] ? config_.gains.kd : 0.0;
    options_.implicit_joint_damping = damping;
    external.clear();
    if (disturbance_ && physics_steps_ >= disturbance_first_step_ && physics_steps_ <= disturbance_last_step_) {
      const Kinematics kin = forward_kinematics(model_->tree, state_);
      const Vec3 com = kin.links[0].rotation * model_->tree.link(0).inertia.com() + kin.links[0].position;
      external.push_back({0, (disturbance_->magnitude / disturbance_->window) * disturbance_->direction, com});
    }
    state_ = quadtail::step(model_->tree, state_, tau, external, config_.physics_dt, options_, &diag);
    ++physics_steps_;
    torque_sum += tau;
    if (!state_finite(state_)) throw RuntimeFault("non-finite simulation state: " + describe(state_));
  }
  // time accumulated from the integer step count
  state_.time = static_cast<double>(physics_steps_) * config_.physics_dt;
  ++steps_;
  const VecX tau_mean = torque_sum / config_.substeps;

  const Kinematics kin = forward_kinematics(model_->tree, state_);
  tracker_.update(diag.foot_contact, config_.control_dt());
  command_ = command_for_time(state_.time);
  const RewardSignals signals = reward_signals(kin, diag.foot_contact);
  info = StepInfo{};
  info.command = command_;
  info.region = region_for_height(state_.base_position.z());
  info.torques = tau_mean;
  info.q_des = q_des;

  RewardBreakdown& r = info.reward;
  const VecX p_leg = state_.joint_positions.head(kLegJoints);
  r.general = general_constraint_reward(p_leg, state_.joint_velocities.head(kLegJoints),
                                        tau_mean.head(kLegJoints), q_des.head(kLegJoints),
                                        q_des_prev_.head(kLegJoints), leg_nominal_,
                                        config_.rewards.general);
  if (config_.task == Task::kReorientation)
    reorient_reward(signals, info.region, nominal_height_, config_.rewards, r);
  else
    turning_reward(signals, command_, tracker_, config_.rewards, r);
  r.compose(config_.rewards.reward_factor);

  const bool body_contact = body_ground_contact(model_->tree, state_, kin);
  const auto reason = check_termination(body_contact, tau_mean.head(kLegJoints), q_des.head(kLegJoints),
                                        q_des_prev_.head(kLegJoints), p_leg, leg_nominal_,
                                        config_.termination);
  if (reason) {
    info.end = EpisodeEnd::kTerminated;
    info.reason = *reason;
    r.total = config_.termination.penalty;
  } else if (config_.aerial_only && info.region == ReorientRegion::kGround) {
    info.end = EpisodeEnd::kTerminated;
    info.reason = TerminationReason::kAerialPhaseEnd;
  } else if (state_.time >= duration_ - 1e-9) {
    info.end = EpisodeEnd::kTruncated;
  }
  done_ = info.end != EpisodeEnd::kNone;

  const VecX obs = observation();
  history_.push(state_.joint_positions);
  q_des_prev_ = q_des;
  return obs;
}

TaskVecEnv::TaskVecEnv(std::shared_ptr<const RobotModel> model, const EnvConfig& config, int num_envs,
                       int num_threads)
    : rngs_(num_envs), num_threads_(std::max(1, num_threads)) {
  if (num_envs <= 0) throw PreconditionError("need at least one environment");
  envs_.reserve(num_envs);
  for (int i = 0; i < num_envs; ++i) envs_.emplace_back(model, config);
  curriculum_ = CurriculumState::initial(
      config.task == Task::kTurning ? (config.stage == 1 ? CurriculumKind::kStage1 : CurriculumKind::kStage2)
                                    : CurriculumKind::kNone);
}

std::vector<std::string> TaskVecEnv::info_names() const { return RewardBreakdown::term_names(); }

template <typename Fn>
void TaskVecEnv::parallel_for(Fn&& fn) {
  const int n = num_envs();
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::min(num_threads_, n);
  if (workers <= 1) {
    run(0, n);
  } else {
    std::vector<std::thread> threads;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w * chunk, std::min(n, (w + 1) * chunk));
    for (auto& t : threads) t.join();
  }
  for (int i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw RuntimeFault("environment " + std::to_string(i) + ": " + e.what());
    }
  }
}

MatX TaskVecEnv::reset(std::uint64_t seed) {
  MatX obs(obs_dim(), num_envs());
  for (int i = 0; i < num_envs(); ++i) rngs_[i].seed(derive_seed(seed, i));
  parallel_for([&](int i) { obs.col(i) = envs_[i].reset(rngs_[i], curriculum_); });
  return obs;
}

VecStepResult TaskVecEnv::step(const MatX& actions) {
  const int n = num_envs();
  if (actions.rows() != act_dim() || actions.cols() != n) throw PreconditionError("action batch shape mismatch");
  VecStepResult r;
  r.rewards.resize(n);
  r.ends.assign(n, EpisodeEnd::kNone);
  r.termination_reasons.assign(n, 0);
  r.observations.resize(obs_dim(), n);
  r.final_observations.resize(obs_dim(), n);
  r.info.resize(static_cast<Eigen::Index>(RewardBreakdown::term_names().size()), n);
  parallel_for([&](int i) {
    StepInfo info;
    const VecX obs = envs_[i].step(actions.col(i), info);
    r.rewards[i] = info.reward.total;
    r.ends[i] = info.end;
    r.termination_reasons[i] = static_cast<int>(info.reason);
    const auto values = info.reward.term_values();
    for (std::size_t k = 0; k < values.size(); ++k) r.info(static_cast<Eigen::Index>(k), i) = values[k];
    r.final_observations.col(i) = obs;
    r.observations.col(i) = info.end == EpisodeEnd::kNone ? obs : envs_[i].reset(rngs_[i], curriculum_);
  });
  return r;
}

}  // namespace quadtail
