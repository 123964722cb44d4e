#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "quadtail/control/action.hpp"
#include "quadtail/control/observation.hpp"
#include "quadtail/curriculum/curriculum.hpp"
#include "quadtail/envs/commands.hpp"
#include "quadtail/envs/termination.hpp"
#include "quadtail/models/build.hpp"
#include "quadtail/ppo/vec_env.hpp"
#include "quadtail/rewards/rewards.hpp"

namespace quadtail {

enum class Task { kTurning, kReorientation, kBalancing };

const char* to_string(Task t);
Task parse_task(const std::string& name);

struct EnvConfig {
  Task task = Task::kTurning;
  int stage = 1;  // turning only
  double physics_dt = 1e-3;
  int substeps = 10;
  double action_scale = 0.3;
  PDGains gains;
  ContactParams contact;
  RewardCoefficients rewards;
  TerminationRules termination;
  TurnCommandConfig turn;
  DisturbanceConfig disturbance;
  double joint_noise = 0.05;  // rad, uniform half-width at reset

  // reorientation
  double drop_min_height = 1.5;
  double drop_max_height = 2.25;
  double drop_min_tilt = 90.0 * kPi / 180.0;
  double drop_max_tilt = 120.0 * kPi / 180.0;
  bool drop_about_roll = false;  // default is a nose-up pitch
  bool aerial_only = false;      // end the episode once p_z < 0.4
  double reorient_duration = 2.5;

  // balancing
  double balance_min_speed = 0.5;
  double balance_max_speed = 3.0;
  double balance_duration = 6.0;

  double control_dt() const { return physics_dt * substeps; }
  void validate() const;
};

/// Reads the `env:` section (and `rewards:` / `termination:`).
EnvConfig env_config_from_config(const YAML::Node& root, const EnvConfig& defaults = {});
void write_env_config(YAML::Node& root, const EnvConfig& c);

/// Everything an evaluation or replay wants to see after one control step.
struct StepInfo {
  RewardBreakdown reward;
  EpisodeEnd end = EpisodeEnd::kNone;
  TerminationReason reason = TerminationReason::kNone;
  Command command;
  ReorientRegion region = ReorientRegion::kGround;
  VecX torques;  // mean over the control step
  VecX q_des;
};

/// Overrides for a reset used by evaluation protocols; unset fields are
/// sampled as in training.
struct ResetOverrides {
  std::optional<double> drop_height;
  std::optional<double> drop_tilt;
  std::optional<double> speed;
  std::optional<double> turn_angle;
  std::optional<double> onset_time;
  std::optional<DisturbanceSpec> disturbance;
  bool no_disturbance = false;
  bool no_joint_noise = false;
};

/// One task environment: PD-controlled robot, commands, rewards and
/// termination. Control step = `substeps` physics steps.
class Environment {
 public:
  Environment(std::shared_ptr<const RobotModel> model, const EnvConfig& config);

  VecX reset(Rng& rng, const CurriculumState& curriculum, const ResetOverrides& overrides = {});
  /// Applies an unscaled policy action. Precondition: not done.
  VecX step(const VecX& action, StepInfo& info);

  const ObservationLayout& layout() const { return layout_; }
  int obs_dim() const { return layout_.size(); }
  int act_dim() const { return model_->num_joints(); }
  const SimState& state() const { return state_; }
  const RobotModel& model() const { return *model_; }
  const EnvConfig& config() const { return config_; }
  const FootContactTracker& tracker() const { return tracker_; }
  const Command& command() const { return command_; }
  const TurnSchedule& schedule() const { return schedule_; }
  const std::optional<DisturbanceSpec>& disturbance() const { return disturbance_; }
  double time() const { return state_.time; }
  double duration() const { return duration_; }
  bool done() const { return done_; }
  int steps() const { return steps_; }
  double nominal_height() const { return nominal_height_; }
  VecX observation() const;

 private:
  std::optional<Command> observed_command() const;
  Command command_for_time(double t) const;
  RewardSignals reward_signals(const Kinematics& kin, const std::vector<bool>& contact) const;

  std::shared_ptr<const RobotModel> model_;
  EnvConfig config_;
  ObservationLayout layout_;
  ActionScaling scaling_;
  StepOptions options_;
  VecX torque_limits_;
  VecX leg_nominal_;
  VecX arm_nominal_;
  double nominal_height_ = 0.0;

  SimState state_;
  JointHistory history_;
  FootContactTracker tracker_;
  VecX q_des_prev_;
  Command command_;
  TurnSchedule schedule_;
  std::optional<DisturbanceSpec> disturbance_;
  long long disturbance_first_step_ = 0;
  long long disturbance_last_step_ = -1;
  long long physics_steps_ = 0;
  double duration_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
};

/// Environments stepped in parallel. Environment i owns the stream
/// derive_seed(seed, i), so results do not depend on the worker count.
class TaskVecEnv : public VecEnv {
 public:
  TaskVecEnv(std::shared_ptr<const RobotModel> model, const EnvConfig& config, int num_envs,
             int num_threads = 1);

  int num_envs() const override { return static_cast<int>(envs_.size()); }
  int obs_dim() const override { return envs_.front().obs_dim(); }
  int act_dim() const override { return envs_.front().act_dim(); }
  std::vector<std::string> info_names() const override;

  MatX reset(std::uint64_t seed) override;
  VecStepResult step(const MatX& actions) override;

  /// Snapshot used for the following resets.
  void set_curriculum(const CurriculumState& c) { curriculum_ = c; }
  const CurriculumState& curriculum() const { return curriculum_; }
  Environment& env(int i) { return envs_.at(i); }

 private:
  template <typename Fn>
  void parallel_for(Fn&& fn);

  std::vector<Environment> envs_;
  std::vector<Rng> rngs_;
  CurriculumState curriculum_;
  int num_threads_;
};

}  // namespace quadtail
