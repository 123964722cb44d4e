#pragma once

#include <cstdint>
#include <vector>

#include "quadtail/common/random.hpp"
#include "quadtail/control/policy.hpp"
#include "quadtail/ppo/vec_env.hpp"

namespace quadtail {

/// Transitions of `horizon` steps from `num_envs` environments, stored
/// time-major: column t * num_envs + e.
struct RolloutBuffer {
  int num_envs = 0;
  int horizon = 0;
  MatX observations;
  MatX actions;
  MatX action_means;
  VecX log_probs;
  VecX rewards;
  VecX values;
  std::vector<EpisodeEnd> ends;
  std::vector<int> termination_reasons;
  VecX last_values;  // V(s_horizon) per environment
  VecX advantages;
  VecX returns;
  int filled = 0;  // completed time steps

  RolloutBuffer() = default;
  RolloutBuffer(int num_envs, int horizon, int obs_dim, int act_dim);

  int capacity() const { return num_envs * horizon; }
  int index(int t, int env) const { return t * num_envs + env; }
  bool full() const { return filled == horizon; }
};

/// Persistent collection state: current observations, per-environment
/// sampling streams and running episode returns.
struct Collector {
  MatX observations;
  std::vector<Rng> rngs;
  VecX episode_returns;
  VecX episode_lengths;

  void reset(VecEnv& env, std::uint64_t seed);
};

struct CollectStats {
  double mean_reward = 0.0;           // per step
  int finished_episodes = 0;
  double mean_episode_return = 0.0;   // over finished episodes
  double mean_episode_length = 0.0;
  int terminations = 0;
  int truncations = 0;
  std::vector<double> info_means;     // per info row
};

/// Fills `buffer` with `buffer.horizon` steps. Truncated episodes get
/// gamma * V(final observation) added to their last reward. The policy,
/// including its observation normalizer, is read only.
CollectStats collect_rollouts(VecEnv& env, const ActorCritic& policy, Collector& collector,
                              RolloutBuffer& buffer, double gamma);

/// Generalized advantage estimation; no bootstrapping across ended
/// episodes. Fills advantages (unnormalized) and returns = adv + values.
void compute_gae(RolloutBuffer& buffer, double gamma, double lambda);

}  // namespace quadtail
