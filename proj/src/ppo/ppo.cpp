#include "quadtail/ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {

void PpoConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw ConfigError("ppo.clip", "must be in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma", "must be in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("ppo.lambda", "must be in (0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("ppo.learning_rate", "must be positive");
  if (!(kl_low > 0.0 && kl_low < kl_high)) throw ConfigError("ppo.kl_low", "need 0 < kl_low < kl_high");
  if (!(min_learning_rate > 0.0 && min_learning_rate <= max_learning_rate))
    throw ConfigError("ppo.min_learning_rate", "need 0 < min <= max");
  if (epochs <= 0) throw ConfigError("ppo.epochs", "must be positive");
  if (minibatches <= 0) throw ConfigError("ppo.minibatches", "must be positive");
  if (!(value_coef >= 0.0)) throw ConfigError("ppo.value_coef", "must be >= 0");
  if (!(entropy_coef >= 0.0)) throw ConfigError("ppo.entropy_coef", "must be >= 0");
  if (!(max_grad_norm > 0.0)) throw ConfigError("ppo.max_grad_norm", "must be positive");
  if (horizon <= 0) throw ConfigError("ppo.horizon", "must be positive");
  if (num_envs <= 0) throw ConfigError("ppo.num_envs", "must be positive");
  if (minibatches > horizon * num_envs)
    throw ConfigError("ppo.minibatches", "more minibatches than transitions");
}

PpoConfig ppo_config_from_config(const YAML::Node& root, const PpoConfig& d) {
  PpoConfig c = d;
  c.clip = read_or(root, "ppo.clip", c.clip);
  c.gamma = read_or(root, "ppo.gamma", c.gamma);
  c.lambda = read_or(root, "ppo.lambda", c.lambda);
  c.learning_rate = read_or(root, "ppo.learning_rate", c.learning_rate);
  c.adaptive_lr = read_or(root, "ppo.adaptive_lr", c.adaptive_lr);
  c.kl_low = read_or(root, "ppo.kl_low", c.kl_low);
  c.kl_high = read_or(root, "ppo.kl_high", c.kl_high);
  c.min_learning_rate = read_or(root, "ppo.min_learning_rate", c.min_learning_rate);
  c.max_learning_rate = read_or(root, "ppo.max_learning_rate", c.max_learning_rate);
  c.epochs = read_or(root, "ppo.epochs", c.epochs);
  c.minibatches = read_or(root, "ppo.minibatches", c.minibatches);
  c.value_coef = read_or(root, "ppo.value_coef", c.value_coef);
  c.entropy_coef = read_or(root, "ppo.entropy_coef", c.entropy_coef);
  c.max_grad_norm = read_or(root, "ppo.max_grad_norm", c.max_grad_norm);
  c.horizon = read_or(root, "ppo.horizon", c.horizon);
  c.num_envs = read_or(root, "ppo.num_envs", c.num_envs);
  c.validate();
  return c;
}

void write_ppo_config(YAML::Node& root, const PpoConfig& c) {
  YAML::Node p = root["ppo"];
  p["clip"] = c.clip;
  p["gamma"] = c.gamma;
  p["lambda"] = c.lambda;
  p["learning_rate"] = c.learning_rate;
  p["adaptive_lr"] = c.adaptive_lr;
  p["kl_low"] = c.kl_low;
  p["kl_high"] = c.kl_high;
  p["min_learning_rate"] = c.min_learning_rate;
  p["max_learning_rate"] = c.max_learning_rate;
  p["epochs"] = c.epochs;
  p["minibatches"] = c.minibatches;
  p["value_coef"] = c.value_coef;
  p["entropy_coef"] = c.entropy_coef;
  p["max_grad_norm"] = c.max_grad_norm;
  p["horizon"] = c.horizon;
  p["num_envs"] = c.num_envs;
}

LossTerms ppo_loss(const ActorCritic& policy, const Minibatch& batch, const PpoConfig& config,
                   VecX* grad) {
  const int b = static_cast<int>(batch.observations.cols());
  const int a = policy.act_dim();
  if (b == 0) throw PreconditionError("empty minibatch");
  const MatX x = policy.normalized(batch.observations);
  Mlp::Cache actor_cache;
  Mlp::Cache critic_cache;
  const MatX mean = policy.actor().forward(x, actor_cache);
  const MatX value = policy.critic().forward(x, critic_cache);
  const VecX& log_std = policy.log_std();
  const VecX inv_var = (-2.0 * log_std.array()).exp().matrix();

  LossTerms out;
  const double inv_b = 1.0 / b;
  VecX dlogp(b);  // d total / d log_prob_i
  for (int i = 0; i < b; ++i) {
    const double lp = gaussian_log_prob(mean.col(i), log_std, batch.actions.col(i));
    const double ratio = std::exp(lp - batch.old_log_probs[i]);
    const double adv = batch.advantages[i];
    const double clipped = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
    const double unclipped_obj = ratio * adv;
    const double clipped_obj = clipped * adv;
    out.surrogate += std::min(unclipped_obj, clipped_obj) * inv_b;
    dlogp[i] = unclipped_obj <= clipped_obj ? -unclipped_obj * inv_b : 0.0;
    if (std::abs(ratio - 1.0) > config.clip) out.clip_fraction += inv_b;
    out.kl += gaussian_kl(batch.old_means.col(i), batch.old_log_std, mean.col(i), log_std) * inv_b;
  }
  const VecX verr = value.row(0).transpose() - batch.returns;
  out.value = verr.squaredNorm() * inv_b;
  out.entropy = gaussian_entropy(log_std);
  out.total = -out.surrogate + config.value_coef * out.value - config.entropy_coef * out.entropy;

  if (grad) {
    grad->setZero(policy.num_parameters());
    const MatX diff = batch.actions - mean;
    // d log_prob / d mean = (a - mean) / var
    MatX dmean = diff.array().colwise() * inv_var.array();
    dmean = dmean.array().rowwise() * dlogp.transpose().array();
    VecX actor_grad = VecX::Zero(policy.actor().num_parameters());
    policy.actor().backward(actor_cache, dmean, actor_grad);
    grad->segment(policy.actor_offset(), actor_grad.size()) = actor_grad;

    // d log_prob / d log_std_j = z_j^2 - 1
    const MatX z2 = diff.array().square().colwise() * inv_var.array();
    VecX dlog_std = (z2.array() - 1.0).matrix() * dlogp;
    dlog_std.array() -= config.entropy_coef;
    grad->segment(policy.log_std_offset(), a) = dlog_std;

    const MatX dvalue = (2.0 * config.value_coef * inv_b) * verr.transpose();
    VecX critic_grad = VecX::Zero(policy.critic().num_parameters());
    policy.critic().backward(critic_cache, dvalue, critic_grad);
    grad->segment(policy.critic_offset(), critic_grad.size()) = critic_grad;
  }
  return out;
}

Minibatch make_minibatch(const RolloutBuffer& buffer, const std::vector<int>& indices,
                         const VecX& log_std, double adv_mean, double adv_std) {
  Minibatch m;
  const int n = static_cast<int>(indices.size());
  m.observations.resize(buffer.observations.rows(), n);
  m.actions.resize(buffer.actions.rows(), n);
  m.old_means.resize(buffer.action_means.rows(), n);
  m.old_log_probs.resize(n);
  m.advantages.resize(n);
  m.returns.resize(n);
  m.old_log_std = log_std;
  for (int i = 0; i < n; ++i) {
    const int k = indices[i];
    m.observations.col(i) = buffer.observations.col(k);
    m.actions.col(i) = buffer.actions.col(k);
    m.old_means.col(i) = buffer.action_means.col(k);
    m.old_log_probs[i] = buffer.log_probs[k];
    m.advantages[i] = (buffer.advantages[k] - adv_mean) / adv_std;
    m.returns[i] = buffer.returns[k];
  }
  return m;
}

PpoStats ppo_update(ActorCritic& policy, Adam& optimizer, const RolloutBuffer& buffer,
                    const PpoConfig& config, double& learning_rate, Rng& rng) {
  if (!buffer.full()) throw PreconditionError("ppo_update needs a full buffer");
  const int n = buffer.capacity();
  const double adv_mean = buffer.advantages.mean();
  const double adv_std =
      std::sqrt((buffer.advantages.array() - adv_mean).square().sum() / std::max(1, n - 1)) + 1e-8;

  const VecX saved_params = policy.parameters();
  const Adam saved_optimizer = optimizer;
  const double saved_lr = learning_rate;
  const VecX old_log_std = policy.log_std();

  PpoStats stats;
  int steps = 0;
  std::vector<int> order(n);
  const int per_batch = n / config.minibatches;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(uniform01(rng) * (i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
    for (int mb = 0; mb < config.minibatches; ++mb) {
      const int begin = mb * per_batch;
      const int end = mb + 1 == config.minibatches ? n : begin + per_batch;
      const std::vector<int> idx(order.begin() + begin, order.begin() + end);
      const Minibatch batch = make_minibatch(buffer, idx, old_log_std, adv_mean, adv_std);
      VecX grad;
      const LossTerms loss = ppo_loss(policy, batch, config, &grad);
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        policy.set_parameters(saved_params);
        optimizer = saved_optimizer;
        learning_rate = saved_lr;
        PpoStats aborted;
        aborted.aborted = true;
        aborted.learning_rate = learning_rate;
        return aborted;
      }
      const double norm = grad.norm();
      if (norm > config.max_grad_norm) grad *= config.max_grad_norm / norm;
      VecX params = policy.parameters();
      optimizer.step(params, grad, learning_rate);
      policy.set_parameters(params);

      stats.surrogate += loss.surrogate;
      stats.value_loss += loss.value;
      stats.entropy += loss.entropy;
      stats.kl += loss.kl;
      stats.clip_fraction += loss.clip_fraction;
      stats.grad_norm += norm;
      ++steps;
    }
  }
  if (!policy.parameters().allFinite()) {
    policy.set_parameters(saved_params);
    optimizer = saved_optimizer;
    learning_rate = saved_lr;
    PpoStats aborted;
    aborted.aborted = true;
    aborted.learning_rate = learning_rate;
    return aborted;
  }
  const double inv = 1.0 / steps;
  stats.surrogate *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.kl *= inv;
  stats.clip_fraction *= inv;
  stats.grad_norm *= inv;
  // one adjustment per update from the mean KL of its minibatches
  if (config.adaptive_lr) {
    if (stats.kl > config.kl_high) learning_rate = std::max(config.min_learning_rate, learning_rate / 2.0);
    else if (stats.kl < config.kl_low) learning_rate = std::min(config.max_learning_rate, learning_rate * 2.0);
  }
  stats.learning_rate = learning_rate;
  return stats;
}

}  // namespace quadtail
