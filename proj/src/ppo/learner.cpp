#include "quadtail/ppo/learner.hpp"

#include "quadtail/common/errors.hpp"

namespace quadtail {

PpoLearner::PpoLearner(VecEnv& env, ActorCritic policy, const PpoConfig& config, std::uint64_t seed)
    : env_(env),
      policy_(std::move(policy)),
      config_(config),
      optimizer_(policy_.num_parameters()),
      learning_rate_(config.learning_rate),
      rng_(derive_seed(seed, 0xabcdef)),
      buffer_(env.num_envs(), config.horizon, env.obs_dim(), env.act_dim()) {
  config_.validate();
  if (policy_.obs_dim() != env.obs_dim() || policy_.act_dim() != env.act_dim())
    throw PreconditionError("policy and environment dimensions differ");
  reset_environments(seed);
}

void PpoLearner::reset_environments(std::uint64_t seed) { collector_.reset(env_, seed); }

IterationStats PpoLearner::iterate() {
  IterationStats s;
  s.collect = collect_rollouts(env_, policy_, collector_, buffer_, config_.gamma);
  compute_gae(buffer_, config_.gamma, config_.lambda);
  s.update = ppo_update(policy_, optimizer_, buffer_, config_, learning_rate_, rng_);
  if (policy_.config().normalize_observations) policy_.normalizer().update(buffer_.observations);
  return s;
}

}  // namespace quadtail
