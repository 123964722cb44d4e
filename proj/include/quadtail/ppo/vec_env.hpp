#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadtail/math/types.hpp"

namespace quadtail {

enum class EpisodeEnd : std::uint8_t { kNone = 0, kTerminated = 1, kTruncated = 2 };

struct VecStepResult {
  VecX rewards;                  // one per environment
  std::vector<EpisodeEnd> ends;  // per environment
  MatX observations;             // next observations, after auto-reset
  MatX final_observations;       // pre-reset observations; valid for truncated columns
  MatX info;                     // info_names() x num_envs, e.g. reward terms
  std::vector<int> termination_reasons;  // 0 when not terminated
};

/// Batch of independent environments that reset themselves when an episode
/// ends. Observations and actions are column-per-environment matrices.
class VecEnv {
 public:
  virtual ~VecEnv() = default;

  virtual int num_envs() const = 0;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual std::vector<std::string> info_names() const { return {}; }

  /// Resets every environment; environment i draws from a stream derived
  /// from (seed, i).
  virtual MatX reset(std::uint64_t seed) = 0;
  virtual VecStepResult step(const MatX& actions) = 0;
};

}  // namespace quadtail
