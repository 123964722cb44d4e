#include <CLI11.hpp>
#include <iostream>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"
#include "quadtail/envs/evaluation.hpp"
#include "quadtail/models/build.hpp"
#include "quadtail/trainer/trainer.hpp"

using namespace quadtail;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kCheckpoint = 3, kRuntime = 4 };

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  int iterations = 0;
  int threads = 0;
  bool quiet = false;
};

struct EvalArgs {
  std::string checkpoint;
  std::string protocol = "random-drops";
  std::string out;
  std::uint64_t seed = 12345;
  int drops = 50;
};

struct ReplayArgs {
  std::string checkpoint;
  std::string out = "replay.csv";
  std::uint64_t seed = 1;
  std::optional<double> height;
  std::optional<double> tilt_deg;
  std::optional<double> speed;
  std::optional<double> turn_deg;
};

int run_train(const TrainArgs& a) {
  const std::filesystem::path path(a.config);
  YAML::Node root = load_config_file(path);
  if (!a.checkpoint.empty()) root["init_checkpoint"] = std::filesystem::absolute(a.checkpoint).string();
  ExperimentConfig c = experiment_from_config(root, path.parent_path());
  if (a.seed) c.seeds = {*a.seed};
  if (!a.out.empty()) c.output_dir = a.out;
  if (a.iterations > 0) c.iterations = a.iterations;
  if (a.threads > 0) c.num_threads = a.threads;
  c.validate();
  TrainOptions opt;
  if (!a.quiet) opt.progress = &std::cout;
  for (const auto& r : train(c, opt))
    std::cout << "seed " << r.seed << ": " << r.iterations << " iterations, final mean reward "
              << r.final_mean_reward << ", checkpoint " << r.final_checkpoint.string() << "\n";
  return kOk;
}

int run_eval(const EvalArgs& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  ProtocolOptions opt;
  opt.seed = a.seed;
  opt.random_drops = a.drops;
  const ProtocolSummary s = run_protocol(ck, parse_protocol(a.protocol), a.out, opt);
  std::cout << s.protocol << ": " << s.rows.size() << " episodes";
  for (const auto& [k, v] : s.aggregates) std::cout << ", " << k << " " << v;
  std::cout << "\n";
  return kOk;
}

int run_replay(const ReplayArgs& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const ExperimentConfig exp = checkpoint_experiment(ck);
  const ActorCritic policy = restore_policy(ck);
  const auto dir = exp.model_dir.empty() ? default_model_dir() : exp.model_dir;
  Environment env(std::make_shared<const RobotModel>(build_variant(exp.variant, dir)), exp.env);
  ResetOverrides o;
  o.drop_height = a.height;
  if (a.tilt_deg) o.drop_tilt = deg_to_rad(*a.tilt_deg);
  o.speed = a.speed;
  if (a.turn_deg) o.turn_angle = deg_to_rad(*a.turn_deg);
  Rng rng(a.seed);
  const EpisodeLog log = run_episode(env, policy, rng, ck.curriculum, o);
  write_episode_csv(a.out, log);
  std::cout << log.rows.size() << " steps, return " << log.episode_return << ", end "
            << (log.survived() ? "time limit" : to_string(log.reason)) << ", written to " << a.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadruped-with-tail simulation and PPO training"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a policy from an experiment config");
  train_cmd->add_option("--config", train_args.config, "experiment YAML")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "single seed overriding the config list");
  train_cmd->add_option("--out", train_args.out, "output directory (default from config)");
  train_cmd->add_option("--checkpoint", train_args.checkpoint, "stage-1 checkpoint for turning stage 2");
  train_cmd->add_option("--iterations", train_args.iterations, "iteration budget, 0 keeps the config value")
      ->capture_default_str();
  train_cmd->add_option("--threads", train_args.threads, "worker threads, 0 keeps the config value")
      ->capture_default_str();
  train_cmd->add_flag("--quiet", train_args.quiet, "no progress lines");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "run an evaluation protocol on a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--protocol", eval_args.protocol, "turning-speeds | drop-grid | impulse-grid | random-drops")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "directory for per-episode CSVs and summary files");
  eval_cmd->add_option("--seed", eval_args.seed, "evaluation seed")->capture_default_str();
  eval_cmd->add_option("--drops", eval_args.drops, "episodes for random-drops")->capture_default_str();

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "run one deterministic episode and write its CSV");
  replay_cmd->add_option("--checkpoint", replay_args.checkpoint, "checkpoint file")->required();
  replay_cmd->add_option("--out", replay_args.out, "episode CSV")->capture_default_str();
  replay_cmd->add_option("--seed", replay_args.seed, "reset seed")->capture_default_str();
  replay_cmd->add_option("--height", replay_args.height, "drop height, m");
  replay_cmd->add_option("--tilt", replay_args.tilt_deg, "drop tilt, deg");
  replay_cmd->add_option("--speed", replay_args.speed, "commanded speed, m/s");
  replay_cmd->add_option("--turn", replay_args.turn_deg, "turn angle, deg");

  std::string export_ck, export_out = "policy.json";
  auto* export_cmd = app.add_subcommand("export-model", "write the actor network as JSON");
  export_cmd->add_option("--checkpoint", export_ck, "checkpoint file")->required();
  export_cmd->add_option("--out", export_out, "JSON file")->capture_default_str();

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "parse an experiment config and print it resolved");
  validate_cmd->add_option("--config", validate_path, "experiment YAML")->required()->check(CLI::ExistingFile);

  std::string defaults_task = "turning";
  int defaults_stage = 1;
  auto* defaults_cmd = app.add_subcommand("defaults", "print the built-in experiment defaults for a task");
  defaults_cmd->add_option("--task", defaults_task, "turning | reorientation | balancing")->capture_default_str();
  defaults_cmd->add_option("--stage", defaults_stage, "turning stage")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*replay_cmd) return run_replay(replay_args);
    if (*export_cmd) {
      export_policy(load_checkpoint(export_ck), export_out);
      std::cout << "written " << export_out << "\n";
      return kOk;
    }
    if (*defaults_cmd) {
      ExperimentConfig c;
      c.env.task = parse_task(defaults_task);
      c.env.stage = defaults_stage;
      c.iterations = c.iteration_budget();
      std::cout << dump_config(experiment_to_config(c)) << "\n";
      return kOk;
    }
    if (*validate_cmd) {
      const ExperimentConfig c = load_experiment(validate_path);
      std::cout << dump_config(experiment_to_config(c)) << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kConfig;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kConfig;
  } catch (const CheckpointError& e) {
    std::cerr << "error: checkpoint: " << e.what() << "\n";
    return kCheckpoint;
  } catch (const RuntimeFault& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return kRuntime;
  } catch (const PreconditionError& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
