#pragma once

#include <filesystem>
#include <optional>

#include "quadtail/control/policy.hpp"
#include "quadtail/curriculum/curriculum.hpp"
#include "quadtail/ppo/adam.hpp"
#include "quadtail/trainer/experiment.hpp"

namespace quadtail {

/// Binary checkpoint: 8-byte magic, uint32 version, uint64 header length,
/// JSON header, float64 arrays in header order, FNV-1a 64 checksum of
/// everything before it. Layout details are in docs/formats.md.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::int64_t iteration = 0;  // completed iterations
  std::uint64_t seed = 0;
  std::string config_yaml;     // resolved experiment config
  CurriculumState curriculum;
  double learning_rate = 0.0;
  int obs_dim = 0;
  int act_dim = 0;
  VecX parameters;
  double normalizer_count = 0.0;
  VecX normalizer_mean;
  VecX normalizer_variance;

  struct AdamState {
    std::int64_t steps = 0;
    VecX first_moment;
    VecX second_moment;
  };
  std::optional<AdamState> adam;
};

Checkpoint make_checkpoint(const ExperimentConfig& config, std::uint64_t seed, std::int64_t iteration,
                           const CurriculumState& curriculum, const ActorCritic& policy, double learning_rate,
                           const Adam* optimizer);

/// Writes to a temporary file and renames it over `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// The experiment the checkpoint was trained with.
ExperimentConfig checkpoint_experiment(const Checkpoint& c);

/// Rebuilds the actor-critic with its normalizer. Throws CheckpointError
/// when the stored sizes disagree with the network description.
ActorCritic restore_policy(const Checkpoint& c);

/// Actor weights, log-stds and normalizer statistics as JSON for use
/// outside this library (layout in docs/formats.md).
void export_policy(const Checkpoint& c, const std::filesystem::path& path);

}  // namespace quadtail
