#include "quadtail/control/policy.hpp"

#include <algorithm>

#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

void PolicyConfig::validate() const {
  for (int h : actor_hidden) {
    if (h <= 0) throw ConfigError("network.actor_hidden", "layer sizes must be positive");
  }
  for (int h : critic_hidden) {
    if (h <= 0) throw ConfigError("network.critic_hidden", "layer sizes must be positive");
  }
  if (!std::isfinite(init_log_std)) throw ConfigError("network.init_std", "must be positive");
  if (!(actor_output_gain > 0.0)) throw ConfigError("network.actor_output_gain", "must be positive");
}

ObservationNormalizer::ObservationNormalizer(int size)
    : mean_(VecX::Zero(size)), var_(VecX::Ones(size)) {}

void ObservationNormalizer::update(const MatX& batch) {
  if (batch.rows() != size()) throw PreconditionError("normalizer dimension mismatch");
  const double n = static_cast<double>(batch.cols());
  if (n == 0.0) return;
  const VecX bmean = batch.rowwise().mean();
  const VecX bvar = (batch.colwise() - bmean).array().square().rowwise().sum() / n;
  const double total = count_ + n;
  const VecX delta = bmean - mean_;
  if (count_ == 0.0) {
    mean_ = bmean;
    var_ = bvar;
  } else {
    mean_ += delta * (n / total);
    var_ = (var_ * count_ + bvar * n + delta.array().square().matrix() * (count_ * n / total)) / total;
  }
  count_ = total;
}

VecX ObservationNormalizer::normalize(const VecX& obs) const { return normalize(MatX(obs)).col(0); }

MatX ObservationNormalizer::normalize(const MatX& batch) const {
  if (batch.rows() != size()) throw PreconditionError("normalizer dimension mismatch");
  const VecX inv_std = (var_.array() + 1e-8).rsqrt().matrix();
  MatX out = (batch.colwise() - mean_).array().colwise() * inv_std.array();
  return out.cwiseMax(-kClip).cwiseMin(kClip);
}

void ObservationNormalizer::set_state(double count, const VecX& mean, const VecX& variance) {
  if (mean.size() != variance.size()) throw PreconditionError("normalizer state size mismatch");
  count_ = count;
  mean_ = mean;
  var_ = variance;
}

double gaussian_log_prob(const VecX& mean, const VecX& log_std, const VecX& x) {
  if (mean.size() != x.size() || log_std.size() != x.size())
    throw PreconditionError("gaussian_log_prob: size mismatch");
  const VecX z = ((x - mean).array() * (-log_std.array()).exp()).matrix();
  return -0.5 * z.squaredNorm() - log_std.sum() - 0.5 * static_cast<double>(x.size()) * kLog2Pi;
}

double gaussian_entropy(const VecX& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * (1.0 + kLog2Pi);
}

double gaussian_kl(const VecX& mean_old, const VecX& log_std_old, const VecX& mean_new,
                   const VecX& log_std_new) {
  const auto var_old = (2.0 * log_std_old.array()).exp();
  const auto var_new = (2.0 * log_std_new.array()).exp();
  return ((log_std_new - log_std_old).array() +
          (var_old + (mean_old - mean_new).array().square()) / (2.0 * var_new) - 0.5)
      .sum();
}

ActorCritic::ActorCritic(int obs_dim, int act_dim, const PolicyConfig& config, std::uint64_t seed)
    : config_(config),
      actor_(layer_sizes(obs_dim, config.actor_hidden, act_dim), config.activation),
      critic_(layer_sizes(obs_dim, config.critic_hidden, 1), config.activation),
      log_std_(VecX::Constant(act_dim, config.init_log_std)),
      normalizer_(obs_dim) {
  config_.validate();
  actor_.initialize(seed, config.actor_output_gain);
  critic_.initialize(derive_seed(seed, 1), 1.0);
}

MatX ActorCritic::normalized(const MatX& raw_obs) const {
  return config_.normalize_observations ? normalizer_.normalize(raw_obs) : raw_obs;
}

MatX ActorCritic::action_mean(const MatX& raw_obs) const { return actor_.forward(normalized(raw_obs)); }

VecX ActorCritic::values(const MatX& raw_obs) const {
  return critic_.forward(normalized(raw_obs)).row(0).transpose();
}

PolicyOutput ActorCritic::forward(const VecX& raw_obs, std::mt19937_64* rng) const {
  if (raw_obs.size() != obs_dim()) throw PreconditionError("policy observation dimension mismatch");
  PolicyOutput out;
  out.mean = action_mean(MatX(raw_obs)).col(0);
  if (rng) {
    out.action.resize(act_dim());
    for (int i = 0; i < act_dim(); ++i)
      out.action[i] = out.mean[i] + std::exp(log_std_[i]) * standard_normal(*rng);
  } else {
    out.action = out.mean;
  }
  out.log_prob = gaussian_log_prob(out.mean, log_std_, out.action);
  return out;
}

int ActorCritic::num_parameters() const {
  return actor_.num_parameters() + act_dim() + critic_.num_parameters();
}

VecX ActorCritic::parameters() const {
  VecX flat(num_parameters());
  flat << actor_.parameters(), log_std_, critic_.parameters();
  return flat;
}

void ActorCritic::set_parameters(const VecX& flat) {
  if (flat.size() != num_parameters()) throw PreconditionError("parameter vector size mismatch");
  actor_.set_parameters(flat.segment(actor_offset(), actor_.num_parameters()));
  log_std_ = flat.segment(log_std_offset(), act_dim());
  critic_.set_parameters(flat.segment(critic_offset(), critic_.num_parameters()));
}

PolicyOutput policy_forward(const ActorCritic& policy, const VecX& raw_obs, std::mt19937_64* rng) {
  return policy.forward(raw_obs, rng);
}

}  // namespace quadtail
