#pragma once

#include <filesystem>
#include <vector>

#include "quadtail/control/policy.hpp"
#include "quadtail/envs/environment.hpp"
#include "quadtail/models/specs.hpp"
#include "quadtail/ppo/ppo.hpp"

namespace quadtail {

/// Everything a training run needs; read from one YAML file.
struct ExperimentConfig {
  std::string name = "experiment";
  TailVariant variant = TailVariant::kViperX300S;
  EnvConfig env;
  PolicyConfig policy;
  PpoConfig ppo;
  double curriculum_threshold = 4.75;
  int iterations = 0;  // 0 picks the task default
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "runs/experiment";
  std::filesystem::path init_checkpoint;  // stage-1 policy for turning stage 2
  std::filesystem::path model_dir;        // empty means the bundled configs/models
  int checkpoint_interval = 100;
  int num_threads = 1;

  int iteration_budget() const;
  CurriculumKind curriculum_kind() const;
  void validate() const;
};

/// 2000 for turning stage 1, 5000 for stage 2, 3000 otherwise.
int default_iterations(Task task, int stage);

PolicyConfig policy_config_from_config(const YAML::Node& root, const PolicyConfig& defaults = {});
void write_policy_config(YAML::Node& root, const PolicyConfig& c);

/// Relative paths inside the file resolve against `base_dir`.
ExperimentConfig experiment_from_config(const YAML::Node& root, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);
YAML::Node experiment_to_config(const ExperimentConfig& c);

}  // namespace quadtail
