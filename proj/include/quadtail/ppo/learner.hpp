#pragma once

#include "quadtail/ppo/ppo.hpp"

namespace quadtail {

struct IterationStats {
  CollectStats collect;
  PpoStats update;
};

/// Collect, advantage, update and normalizer refresh for one VecEnv.
class PpoLearner {
 public:
  PpoLearner(VecEnv& env, ActorCritic policy, const PpoConfig& config, std::uint64_t seed);

  /// Resets the environments and the collector; the policy is kept.
  void reset_environments(std::uint64_t seed);
  IterationStats iterate();

  ActorCritic& policy() { return policy_; }
  const ActorCritic& policy() const { return policy_; }
  Adam& optimizer() { return optimizer_; }
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }
  Rng& update_rng() { return rng_; }
  const PpoConfig& config() const { return config_; }

 private:
  VecEnv& env_;
  ActorCritic policy_;
  PpoConfig config_;
  Adam optimizer_;
  double learning_rate_;
  Rng rng_;
  Collector collector_;
  RolloutBuffer buffer_;
};

}  // namespace quadtail
