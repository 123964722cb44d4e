#include "quadtail/trainer/experiment.hpp"

#include <cmath>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

std::vector<int> read_sizes(const YAML::Node& root, const char* key, const std::vector<int>& fallback) {
  const auto sizes = read_or(root, key, fallback);
  for (int s : sizes)
    if (s <= 0) throw ConfigError(key, "layer sizes must be positive");
  return sizes;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

int default_iterations(Task task, int stage) {
  if (task == Task::kTurning) return stage == 1 ? 2000 : 5000;
  return 3000;
}

int ExperimentConfig::iteration_budget() const {
  return iterations > 0 ? iterations : default_iterations(env.task, env.stage);
}

CurriculumKind ExperimentConfig::curriculum_kind() const {
  if (env.task != Task::kTurning) return CurriculumKind::kNone;
  return env.stage == 1 ? CurriculumKind::kStage1 : CurriculumKind::kStage2;
}

void ExperimentConfig::validate() const {
  env.validate();
  policy.validate();
  ppo.validate();
  if (iterations < 0) throw ConfigError("iterations", "must be >= 0");
  if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  if (checkpoint_interval <= 0) throw ConfigError("checkpoint_interval", "must be positive");
  if (num_threads <= 0) throw ConfigError("num_threads", "must be positive");
  if (env.task == Task::kTurning && env.stage == 2 && init_checkpoint.empty())
    throw ConfigError("init_checkpoint", "turning stage 2 starts from a stage-1 checkpoint");
}

PolicyConfig policy_config_from_config(const YAML::Node& root, const PolicyConfig& d) {
  PolicyConfig c = d;
  c.actor_hidden = read_sizes(root, "network.actor_hidden", c.actor_hidden);
  c.critic_hidden = read_sizes(root, "network.critic_hidden", c.critic_hidden);
  if (lookup(root, "network.activation").IsDefined())
    c.activation = parse_activation(read_required<std::string>(root, "network.activation"));
  const double init_std = read_or(root, "network.init_std", std::exp(c.init_log_std));
  if (!(init_std > 0.0)) throw ConfigError("network.init_std", "must be positive");
  c.init_log_std = std::log(init_std);
  c.normalize_observations = read_or(root, "network.normalize_observations", c.normalize_observations);
  c.actor_output_gain = read_or(root, "network.actor_output_gain", c.actor_output_gain);
  c.validate();
  return c;
}

void write_policy_config(YAML::Node& root, const PolicyConfig& c) {
  YAML::Node n = root["network"];
  n["actor_hidden"] = c.actor_hidden;
  n["critic_hidden"] = c.critic_hidden;
  n["activation"] = to_string(c.activation);
  n["init_std"] = std::exp(c.init_log_std);
  n["normalize_observations"] = c.normalize_observations;
  n["actor_output_gain"] = c.actor_output_gain;
}

ExperimentConfig experiment_from_config(const YAML::Node& root, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.name = read_or(root, "name", c.name);
  if (lookup(root, "variant").IsDefined()) {
    const auto name = read_required<std::string>(root, "variant");
    try {
      c.variant = parse_tail_variant(name);
    } catch (const ConfigError&) {
      throw ConfigError("variant", "expected none, widowx250s or viperx300s, got '" + name + "'");
    }
  }
  c.env = env_config_from_config(root, c.env);
  c.policy = policy_config_from_config(root, c.policy);
  c.ppo = ppo_config_from_config(root, c.ppo);
  c.curriculum_threshold = read_or(root, "curriculum.threshold", c.curriculum_threshold);
  c.iterations = read_or(root, "iterations", c.iterations);
  const YAML::Node seeds = lookup(root, "seeds");
  if (seeds.IsDefined()) {
    c.seeds = seeds.IsSequence() ? read_required<std::vector<std::uint64_t>>(root, "seeds")
                                 : std::vector<std::uint64_t>{read_required<std::uint64_t>(root, "seeds")};
  }
  c.output_dir = resolve(base_dir, read_or(root, "output_dir", c.output_dir.string()));
  c.init_checkpoint = resolve(base_dir, read_or(root, "init_checkpoint", std::string()));
  c.model_dir = resolve(base_dir, read_or(root, "model_dir", std::string()));
  c.checkpoint_interval = read_or(root, "checkpoint_interval", c.checkpoint_interval);
  c.num_threads = read_or(root, "num_threads", c.num_threads);
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_config(load_config_file(path), path.parent_path());
}

YAML::Node experiment_to_config(const ExperimentConfig& c) {
  YAML::Node root;
  root["name"] = c.name;
  root["variant"] = to_string(c.variant);
  write_env_config(root, c.env);
  write_policy_config(root, c.policy);
  write_ppo_config(root, c.ppo);
  root["curriculum"]["threshold"] = c.curriculum_threshold;
  root["iterations"] = c.iterations;
  root["seeds"] = c.seeds;
  root["output_dir"] = c.output_dir.string();
  if (!c.init_checkpoint.empty()) root["init_checkpoint"] = c.init_checkpoint.string();
  if (!c.model_dir.empty()) root["model_dir"] = c.model_dir.string();
  root["checkpoint_interval"] = c.checkpoint_interval;
  root["num_threads"] = c.num_threads;
  return root;
}

}  // namespace quadtail
