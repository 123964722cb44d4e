#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "quadtail/common/random.hpp"
#include "quadtail/control/mlp.hpp"

namespace quadtail {

struct PolicyConfig {
  std::vector<int> actor_hidden{512, 256, 128};
  std::vector<int> critic_hidden{512, 256, 128};
  Activation activation = Activation::kElu;
  double init_log_std = std::log(0.8);
  bool normalize_observations = true;
  double actor_output_gain = 0.01;

  void validate() const;
};

/// Running mean/variance of observations (parallel Welford merge). Updated
/// during collection only; evaluation uses the frozen statistics.
class ObservationNormalizer {
 public:
  ObservationNormalizer() = default;
  explicit ObservationNormalizer(int size);

  void update(const MatX& batch);  // one sample per column
  VecX normalize(const VecX& obs) const;
  MatX normalize(const MatX& batch) const;

  int size() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const VecX& mean() const { return mean_; }
  const VecX& variance() const { return var_; }
  void set_state(double count, const VecX& mean, const VecX& variance);

  static constexpr double kClip = 10.0;

 private:
  double count_ = 0.0;
  VecX mean_;
  VecX var_;
};

/// Gaussian log-density with a diagonal, state-independent std.
double gaussian_log_prob(const VecX& mean, const VecX& log_std, const VecX& x);
double gaussian_entropy(const VecX& log_std);
/// KL(old || new) for two diagonal Gaussians.
double gaussian_kl(const VecX& mean_old, const VecX& log_std_old, const VecX& mean_new,
                   const VecX& log_std_new);

struct PolicyOutput {
  VecX mean;
  VecX action;
  double log_prob = 0.0;
};

/// Actor (mean network plus free log-stds) and critic sharing one
/// observation normalizer. Flat parameter layout: actor, log_std, critic.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(int obs_dim, int act_dim, const PolicyConfig& config, std::uint64_t seed);

  int obs_dim() const { return actor_.input_size(); }
  int act_dim() const { return actor_.output_size(); }
  const PolicyConfig& config() const { return config_; }

  /// Takes raw observations; normalization is applied inside.
  MatX action_mean(const MatX& raw_obs) const;
  VecX values(const MatX& raw_obs) const;

  /// Samples from the Gaussian when `rng` is given, otherwise returns the
  /// mean as the action (evaluation mode).
  PolicyOutput forward(const VecX& raw_obs, std::mt19937_64* rng) const;

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  VecX& log_std() { return log_std_; }
  const VecX& log_std() const { return log_std_; }
  ObservationNormalizer& normalizer() { return normalizer_; }
  const ObservationNormalizer& normalizer() const { return normalizer_; }

  int num_parameters() const;
  VecX parameters() const;
  void set_parameters(const VecX& flat);
  int actor_offset() const { return 0; }
  int log_std_offset() const { return actor_.num_parameters(); }
  int critic_offset() const { return log_std_offset() + act_dim(); }

  MatX normalized(const MatX& raw_obs) const;

 private:
  PolicyConfig config_;
  Mlp actor_;
  Mlp critic_;
  VecX log_std_;
  ObservationNormalizer normalizer_;
};

/// Free-function form of ActorCritic::forward.
PolicyOutput policy_forward(const ActorCritic& policy, const VecX& raw_obs, std::mt19937_64* rng);

}  // namespace quadtail
