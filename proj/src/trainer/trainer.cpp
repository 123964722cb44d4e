#include "quadtail/trainer/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>

#include "quadtail/common/config.hpp"
#include "quadtail/common/csv.hpp"
#include "quadtail/common/errors.hpp"
#include "quadtail/envs/evaluation.hpp"
#include "quadtail/models/build.hpp"
#include "quadtail/ppo/learner.hpp"

namespace quadtail {
namespace {

std::shared_ptr<const RobotModel> load_robot(const ExperimentConfig& c, const std::filesystem::path& override_dir = {}) {
  const auto dir = !override_dir.empty() ? override_dir : !c.model_dir.empty() ? c.model_dir : default_model_dir();
  return std::make_shared<const RobotModel>(build_variant(c.variant, dir));
}

ActorCritic initial_policy(const ExperimentConfig& c, const VecEnv& env, std::uint64_t seed) {
  if (!(c.env.task == Task::kTurning && c.env.stage == 2))
    return ActorCritic(env.obs_dim(), env.act_dim(), c.policy, seed);
  if (!std::filesystem::exists(c.init_checkpoint))
    throw ConfigError("init_checkpoint", "stage-1 checkpoint not found: " + c.init_checkpoint.string());
  const Checkpoint ck = load_checkpoint(c.init_checkpoint);
  const ExperimentConfig prev = checkpoint_experiment(ck);
  if (prev.env.task != Task::kTurning || prev.env.stage != 1)
    throw ConfigError("init_checkpoint", "expected a turning stage-1 checkpoint");
  if (prev.variant != c.variant) throw ConfigError("init_checkpoint", "checkpoint was trained on another robot");
  if (ck.obs_dim != env.obs_dim() || ck.act_dim != env.act_dim())
    throw ConfigError("init_checkpoint", "checkpoint dimensions do not match the environment");
  return restore_policy(ck);
}

bool finite_stats(const IterationStats& s) {
  return std::isfinite(s.collect.mean_reward) && std::isfinite(s.update.surrogate) &&
         std::isfinite(s.update.value_loss) && std::isfinite(s.update.kl) && !s.update.aborted;
}

std::string iteration_name(std::int64_t i) {
  std::ostringstream os;
  os << "iter_" << std::setw(6) << std::setfill('0') << i << ".ckpt";
  return os.str();
}

}  // namespace

std::vector<std::string> iteration_csv_header(const std::vector<std::string>& info_names) {
  std::vector<std::string> h{"iteration", "mean_reward", "mean_episode_return", "mean_episode_length",
                             "finished_episodes", "terminations", "truncations"};
  for (const auto& n : info_names) h.push_back("mean_" + n);
  for (const char* n : {"reward_step", "velocity_cmd", "command_range", "kl", "learning_rate", "surrogate",
                        "value_loss", "entropy", "clip_fraction"})
    h.emplace_back(n);
  return h;
}

TrainResult train_seed(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& run_dir,
                       const TrainOptions& options) {
  config.validate();
  std::filesystem::create_directories(run_dir / "checkpoints");
  {
    ExperimentConfig resolved = config;
    resolved.seeds = {seed};
    resolved.output_dir = run_dir;
    std::ofstream(run_dir / "config.yaml") << dump_config(experiment_to_config(resolved)) << "\n";
  }
  const auto robot = load_robot(config);
  PpoConfig ppo = config.ppo;
  TaskVecEnv env(robot, config.env, ppo.num_envs, config.num_threads);
  CurriculumState curriculum = CurriculumState::initial(config.curriculum_kind(), config.curriculum_threshold);
  env.set_curriculum(curriculum);
  PpoLearner learner(env, initial_policy(config, env, seed), ppo, seed);

  CsvWriter csv(run_dir / "iterations.csv", iteration_csv_header(env.info_names()));
  TrainResult result;
  result.seed = seed;
  result.run_dir = run_dir;
  const int budget = config.iteration_budget();
  const auto start = std::chrono::steady_clock::now();
  auto save = [&](const std::filesystem::path& p, std::int64_t done) {
    save_checkpoint(p, make_checkpoint(config, seed, done, curriculum, learner.policy(), learner.learning_rate(),
                                       &learner.optimizer()));
  };

  for (int i = 0; i < budget; ++i) {
    const IterationStats s = learner.iterate();
    if (!finite_stats(s)) {
      save(run_dir / "last_good.ckpt", i);
      throw RuntimeFault("non-finite training statistics at iteration " + std::to_string(i) +
                         "; last good policy saved to " + (run_dir / "last_good.ckpt").string());
    }
    curriculum = advance(curriculum, s.collect.mean_reward);
    env.set_curriculum(curriculum);

    std::vector<CsvCell> row{static_cast<long long>(i), s.collect.mean_reward, s.collect.mean_episode_return,
                             s.collect.mean_episode_length, static_cast<long long>(s.collect.finished_episodes),
                             static_cast<long long>(s.collect.terminations),
                             static_cast<long long>(s.collect.truncations)};
    for (double m : s.collect.info_means) row.emplace_back(m);
    row.insert(row.end(), {static_cast<long long>(curriculum.reward_step), curriculum.velocity,
                           static_cast<long long>(curriculum.command_range), s.update.kl, s.update.learning_rate,
                           s.update.surrogate, s.update.value_loss, s.update.entropy, s.update.clip_fraction});
    csv.row(row);
    result.final_mean_reward = s.collect.mean_reward;

    if ((i + 1) % config.checkpoint_interval == 0) {
      csv.flush();
      save(run_dir / "checkpoints" / iteration_name(i + 1), i + 1);
    }
    if (options.progress && (i % options.progress_every == 0 || i + 1 == budget)) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *options.progress << "seed " << seed << " iter " << i << "/" << budget << " reward " << s.collect.mean_reward
                        << " ep_len " << s.collect.mean_episode_length << " v_cmd " << curriculum.velocity
                        << " kl " << s.update.kl << " elapsed " << std::fixed << std::setprecision(1) << secs
                        << "s" << std::defaultfloat << std::setprecision(6) << "\n";
    }
  }
  csv.flush();
  result.iterations = budget;
  result.curriculum = curriculum;
  result.final_checkpoint = run_dir / "final.ckpt";
  save(result.final_checkpoint, budget);
  return result;
}

std::vector<TrainResult> train(const ExperimentConfig& config, const TrainOptions& options) {
  config.validate();
  std::vector<TrainResult> out;
  for (std::uint64_t seed : config.seeds) {
    const auto dir =
        config.seeds.size() == 1 ? config.output_dir : config.output_dir / ("seed_" + std::to_string(seed));
    out.push_back(train_seed(config, seed, dir, options));
  }
  return out;
}

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::kTurningSpeeds: return "turning-speeds";
    case Protocol::kDropGrid: return "drop-grid";
    case Protocol::kImpulseGrid: return "impulse-grid";
    case Protocol::kRandomDrops: return "random-drops";
  }
  return "turning-speeds";
}

Protocol parse_protocol(const std::string& name) {
  for (Protocol p : {Protocol::kTurningSpeeds, Protocol::kDropGrid, Protocol::kImpulseGrid, Protocol::kRandomDrops})
    if (name == to_string(p)) return p;
  throw ConfigError("protocol", "expected turning-speeds, drop-grid, impulse-grid or random-drops");
}

void write_protocol_summary(const std::filesystem::path& out_dir, const ProtocolSummary& s) {
  std::filesystem::create_directories(out_dir);
  {
    CsvWriter w(out_dir / "summary.csv", s.columns);
    for (const auto& r : s.rows) w.row(std::vector<CsvCell>(r.begin(), r.end()));
  }
  nlohmann::json j;
  j["protocol"] = s.protocol;
  j["episodes"] = s.rows.size();
  for (const auto& [k, v] : s.aggregates) j["aggregates"][k] = v;
  std::ofstream(out_dir / "summary.json") << j.dump(2) << "\n";
}

ProtocolSummary run_protocol(const Checkpoint& checkpoint, Protocol protocol, const std::filesystem::path& out_dir,
                             const ProtocolOptions& options) {
  const ExperimentConfig exp = checkpoint_experiment(checkpoint);
  const Task needed = protocol == Protocol::kTurningSpeeds ? Task::kTurning
                      : protocol == Protocol::kImpulseGrid ? Task::kBalancing
                                                           : Task::kReorientation;
  if (exp.env.task != needed)
    throw CheckpointError(std::string("a ") + to_string(exp.env.task) + " checkpoint cannot run the " +
                          to_string(protocol) + " protocol");
  const ActorCritic policy = restore_policy(checkpoint);
  Environment env(load_robot(exp, options.model_dir), exp.env);
  if (env.obs_dim() != checkpoint.obs_dim || env.act_dim() != checkpoint.act_dim)
    throw CheckpointError("checkpoint dimensions do not match the environment");
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);

  ProtocolSummary s;
  s.protocol = to_string(protocol);
  std::uint64_t index = 0;
  auto next_rng = [&] { return Rng(derive_seed(options.seed, index++)); };

  if (protocol == Protocol::kTurningSpeeds) {
    s.columns = {"speed", "turn_angle_deg", "onset_time", "peak_lateral_displacement", "completion_time", "survived"};
    const auto curriculum = CurriculumState::initial(CurriculumKind::kStage2, exp.curriculum_threshold);
    for (double speed : {3.0, 3.5, 4.0, 4.5}) {
      ResetOverrides o;
      o.speed = speed;
      o.turn_angle = deg_to_rad(135.0);
      o.onset_time = exp.env.turn.warmup;
      o.no_joint_noise = true;
      Rng rng = next_rng();
      const EpisodeLog log = run_episode(env, policy, rng, curriculum, o);
      const TurningMetrics m = turning_metrics(log, env.schedule());
      s.rows.push_back({speed, 135.0, m.onset_time, m.peak_lateral_displacement, m.completion_time,
                        m.survived ? 1.0 : 0.0});
      if (write) {
        std::ostringstream name;
        name << "speed_" << std::fixed << std::setprecision(1) << speed;
        write_episode_csv(out_dir / (name.str() + ".csv"), log);
        CsvWriter dots(out_dir / (name.str() + "_dots.csv"), {"time", "x", "y"});
        for (const auto& d : trajectory_dots(log)) dots.row({d.time, d.x, d.y});
      }
    }
  } else if (protocol == Protocol::kDropGrid || protocol == Protocol::kRandomDrops) {
    s.columns = {"drop_height",         "initial_tilt_deg", "achieved_rotation_deg", "rotation_0_5s_deg",
                 "min_aerial_tilt_deg", "touchdown_time",   "tilt_at_touchdown_deg", "landed"};
    const auto curriculum = CurriculumState::initial(CurriculumKind::kNone);
    std::vector<std::pair<double, double>> drops;
    if (protocol == Protocol::kDropGrid) {
      for (double h : {1.5, 1.75, 2.0, 2.25})
        for (double t : {90.0, 105.0, 120.0}) drops.emplace_back(h, t);
    } else {
      drops.assign(static_cast<std::size_t>(options.random_drops), {-1.0, -1.0});
    }
    double total = 0.0, total_window = 0.0;
    int landed = 0;
    for (std::size_t k = 0; k < drops.size(); ++k) {
      ResetOverrides o;
      if (drops[k].first > 0.0) {
        o.drop_height = drops[k].first;
        o.drop_tilt = deg_to_rad(drops[k].second);
        o.no_joint_noise = true;
      }
      Rng rng = next_rng();
      const EpisodeLog log = run_episode(env, policy, rng, curriculum, o);
      const ReorientMetrics m = reorient_metrics(log);
      s.rows.push_back({m.drop_height, rad_to_deg(m.initial_tilt), rad_to_deg(m.achieved_rotation),
                        rad_to_deg(m.window_rotation), rad_to_deg(m.min_aerial_tilt), m.touchdown_time, rad_to_deg(m.tilt_at_touchdown),
                        m.landed ? 1.0 : 0.0});
      total += rad_to_deg(m.achieved_rotation);
      total_window += rad_to_deg(m.window_rotation);
      landed += m.landed ? 1 : 0;
      if (write && protocol == Protocol::kDropGrid) {
        std::ostringstream name;
        name << "drop_h" << std::fixed << std::setprecision(2) << drops[k].first << "_t" << std::setprecision(0)
             << drops[k].second;
        write_episode_csv(out_dir / (name.str() + ".csv"), log);
        CsvWriter series(out_dir / (name.str() + "_tilt.csv"), {"time", "tilt_deg"});
        for (const auto& [t, tilt] : tilt_series(log)) series.row({t, rad_to_deg(tilt)});
      }
    }
    s.aggregates["mean_achieved_rotation_deg"] = total / static_cast<double>(drops.size());
    s.aggregates["mean_rotation_0_5s_deg"] = total_window / static_cast<double>(drops.size());
    s.aggregates["landing_rate"] = static_cast<double>(landed) / static_cast<double>(drops.size());
  } else {
    s.columns = {"jy", "jz", "survived", "termination_reason"};
    const auto cells = impulse_grid(env, policy, options.seed);
    int survived = 0;
    for (const auto& c : cells) {
      s.rows.push_back({c.jy, c.jz, c.survived ? 1.0 : 0.0, static_cast<double>(static_cast<int>(c.reason))});
      survived += c.survived ? 1 : 0;
    }
    s.aggregates["survival_rate"] = static_cast<double>(survived) / static_cast<double>(cells.size());
  }
  if (write) write_protocol_summary(out_dir, s);
  return s;
}

}  // namespace quadtail
