#pragma once

#include <vector>

#include "quadtail/common/random.hpp"
#include "quadtail/ppo/vec_env.hpp"

namespace quadtail {

/// One-dimensional velocity tracking: v' = 0.7 v + 0.3 a, command c drawn
/// from [-1, 1] per episode, reward exp(-4 (v' - c)^2). Observation (v, c).
/// Episodes are truncated after `episode_length` steps.
class ToyVelocityEnv : public VecEnv {
 public:
  explicit ToyVelocityEnv(int num_envs, int episode_length = 20);

  int num_envs() const override { return static_cast<int>(velocity_.size()); }
  int obs_dim() const override { return 2; }
  int act_dim() const override { return 1; }

  MatX reset(std::uint64_t seed) override;
  VecStepResult step(const MatX& actions) override;

 private:
  void reset_one(int e);
  MatX observations() const;

  int episode_length_;
  std::vector<double> velocity_;
  std::vector<double> command_;
  std::vector<int> steps_;
  std::vector<Rng> rngs_;
};

}  // namespace quadtail
