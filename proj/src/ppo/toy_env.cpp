#include "quadtail/ppo/toy_env.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

ToyVelocityEnv::ToyVelocityEnv(int num_envs, int episode_length)
    : episode_length_(episode_length),
      velocity_(num_envs, 0.0),
      command_(num_envs, 0.0),
      steps_(num_envs, 0),
      rngs_(num_envs) {
  if (num_envs <= 0 || episode_length <= 0) throw PreconditionError("toy env sizes must be positive");
}

void ToyVelocityEnv::reset_one(int e) {
  velocity_[e] = 0.0;
  command_[e] = uniform(rngs_[e], -1.0, 1.0);
  steps_[e] = 0;
}

MatX ToyVelocityEnv::observations() const {
  MatX obs(2, num_envs());
  for (int e = 0; e < num_envs(); ++e) {
    obs(0, e) = velocity_[e];
    obs(1, e) = command_[e];
  }
  return obs;
}

MatX ToyVelocityEnv::reset(std::uint64_t seed) {
  for (int e = 0; e < num_envs(); ++e) {
    rngs_[e].seed(derive_seed(seed, e));
    reset_one(e);
  }
  return observations();
}

VecStepResult ToyVelocityEnv::step(const MatX& actions) {
  if (actions.rows() != 1 || actions.cols() != num_envs())
    throw PreconditionError("toy env action shape mismatch");
  VecStepResult r;
  r.rewards.resize(num_envs());
  r.ends.assign(num_envs(), EpisodeEnd::kNone);
  for (int e = 0; e < num_envs(); ++e) {
    velocity_[e] = 0.7 * velocity_[e] + 0.3 * actions(0, e);
    const double err = velocity_[e] - command_[e];
    r.rewards[e] = std::exp(-4.0 * err * err);
    if (++steps_[e] >= episode_length_) r.ends[e] = EpisodeEnd::kTruncated;
  }
  r.final_observations = observations();
  for (int e = 0; e < num_envs(); ++e) {
    if (r.ends[e] != EpisodeEnd::kNone) reset_one(e);
  }
  r.observations = observations();
  return r;
}

}  // namespace quadtail
