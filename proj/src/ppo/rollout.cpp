#include "quadtail/ppo/rollout.hpp"

#include <cmath>
#include <string>

#include "quadtail/common/errors.hpp"

namespace quadtail {

RolloutBuffer::RolloutBuffer(int num_envs_, int horizon_, int obs_dim, int act_dim)
    : num_envs(num_envs_), horizon(horizon_) {
  if (num_envs <= 0 || horizon <= 0) throw PreconditionError("rollout buffer needs envs and horizon");
  const int n = capacity();
  observations.resize(obs_dim, n);
  actions.resize(act_dim, n);
  action_means.resize(act_dim, n);
  log_probs.resize(n);
  rewards.resize(n);
  values.resize(n);
  ends.assign(n, EpisodeEnd::kNone);
  termination_reasons.assign(n, 0);
  last_values = VecX::Zero(num_envs);
  advantages = VecX::Zero(n);
  returns = VecX::Zero(n);
}

void Collector::reset(VecEnv& env, std::uint64_t seed) {
  observations = env.reset(seed);
  rngs.clear();
  for (int e = 0; e < env.num_envs(); ++e) rngs.emplace_back(derive_seed(seed ^ 0x5bd1e995ULL, e));
  episode_returns = VecX::Zero(env.num_envs());
  episode_lengths = VecX::Zero(env.num_envs());
}

CollectStats collect_rollouts(VecEnv& env, const ActorCritic& policy, Collector& collector,
                              RolloutBuffer& buffer, double gamma) {
  const int n = env.num_envs();
  if (buffer.num_envs != n || static_cast<int>(collector.rngs.size()) != n)
    throw PreconditionError("collector/buffer/environment count mismatch");
  if (buffer.observations.rows() != env.obs_dim() || buffer.actions.rows() != env.act_dim())
    throw PreconditionError("rollout buffer dimension mismatch");

  CollectStats stats;
  const auto info_rows = env.info_names().size();
  stats.info_means.assign(info_rows, 0.0);
  double return_sum = 0.0;
  double length_sum = 0.0;
  const VecX std_dev = policy.log_std().array().exp().matrix();

  buffer.filled = 0;
  for (int t = 0; t < buffer.horizon; ++t) {
    const MatX& obs = collector.observations;
    const MatX normalized = policy.normalized(obs);
    const MatX means = policy.actor().forward(normalized);
    const VecX values = policy.critic().forward(normalized).row(0).transpose();
    MatX actions(env.act_dim(), n);
    for (int e = 0; e < n; ++e) {
      for (int i = 0; i < env.act_dim(); ++i)
        actions(i, e) = means(i, e) + std_dev[i] * standard_normal(collector.rngs[e]);
      const int k = buffer.index(t, e);
      buffer.observations.col(k) = obs.col(e);
      buffer.actions.col(k) = actions.col(e);
      buffer.action_means.col(k) = means.col(e);
      buffer.log_probs[k] = gaussian_log_prob(means.col(e), policy.log_std(), actions.col(e));
      buffer.values[k] = values[e];
    }

    VecStepResult r = env.step(actions);
    VecX bootstrap = VecX::Zero(n);
    bool any_truncated = false;
    for (int e = 0; e < n; ++e) any_truncated |= r.ends[e] == EpisodeEnd::kTruncated;
    if (any_truncated) bootstrap = policy.values(r.final_observations);

    for (int e = 0; e < n; ++e) {
      const int k = buffer.index(t, e);
      const double reward = r.rewards[e];
      if (!std::isfinite(reward))
        throw RuntimeFault("environment " + std::to_string(e) + " returned a non-finite reward");
      buffer.rewards[k] = reward;
      buffer.ends[k] = r.ends[e];
      buffer.termination_reasons[k] = r.termination_reasons.empty() ? 0 : r.termination_reasons[e];
      if (r.ends[e] == EpisodeEnd::kTruncated) buffer.rewards[k] += gamma * bootstrap[e];
      stats.mean_reward += reward;
      for (std::size_t i = 0; i < info_rows; ++i) stats.info_means[i] += r.info(i, e);
      collector.episode_returns[e] += reward;
      collector.episode_lengths[e] += 1.0;
      if (r.ends[e] != EpisodeEnd::kNone) {
        ++stats.finished_episodes;
        if (r.ends[e] == EpisodeEnd::kTerminated) ++stats.terminations;
        else ++stats.truncations;
        return_sum += collector.episode_returns[e];
        length_sum += collector.episode_lengths[e];
        collector.episode_returns[e] = 0.0;
        collector.episode_lengths[e] = 0.0;
      }
    }
    collector.observations = std::move(r.observations);
    buffer.filled = t + 1;
  }
  buffer.last_values = policy.values(collector.observations);

  const double steps = static_cast<double>(buffer.capacity());
  stats.mean_reward /= steps;
  for (double& m : stats.info_means) m /= steps;
  if (stats.finished_episodes > 0) {
    stats.mean_episode_return = return_sum / stats.finished_episodes;
    stats.mean_episode_length = length_sum / stats.finished_episodes;
  }
  return stats;
}

void compute_gae(RolloutBuffer& buffer, double gamma, double lambda) {
  if (!buffer.full()) throw PreconditionError("compute_gae needs a full buffer");
  for (int e = 0; e < buffer.num_envs; ++e) {
    double next_value = buffer.last_values[e];
    double gae = 0.0;
    for (int t = buffer.horizon - 1; t >= 0; --t) {
      const int k = buffer.index(t, e);
      const double not_done = buffer.ends[k] == EpisodeEnd::kNone ? 1.0 : 0.0;
      const double delta = buffer.rewards[k] + gamma * next_value * not_done - buffer.values[k];
      gae = delta + gamma * lambda * not_done * gae;
      buffer.advantages[k] = gae;
      buffer.returns[k] = gae + buffer.values[k];
      next_value = buffer.values[k];
    }
  }
}

}  // namespace quadtail
