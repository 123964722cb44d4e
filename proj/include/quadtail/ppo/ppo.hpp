#pragma once

#include <yaml-cpp/yaml.h>

#include "quadtail/common/random.hpp"
#include "quadtail/control/policy.hpp"
#include "quadtail/ppo/adam.hpp"
#include "quadtail/ppo/rollout.hpp"

namespace quadtail {

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double learning_rate = 3e-4;
  bool adaptive_lr = true;
  double kl_low = 0.004;   // lr doubles below
  double kl_high = 0.02;   // lr halves above
  double min_learning_rate = 1e-5;
  double max_learning_rate = 1e-2;
  int epochs = 4;
  int minibatches = 4;
  double value_coef = 1.0;
  double entropy_coef = 0.0;
  double max_grad_norm = 1.0;
  int horizon = 100;
  int num_envs = 256;

  void validate() const;
};

PpoConfig ppo_config_from_config(const YAML::Node& root, const PpoConfig& defaults = {});
void write_ppo_config(YAML::Node& root, const PpoConfig& c);

/// Columns of a rollout buffer with normalized advantages.
struct Minibatch {
  MatX observations;  // raw
  MatX actions;
  MatX old_means;
  VecX old_log_std;
  VecX old_log_probs;
  VecX advantages;
  VecX returns;
};

struct LossTerms {
  double total = 0.0;
  double surrogate = 0.0;  // mean clipped surrogate (to maximize)
  double value = 0.0;      // mean squared value error
  double entropy = 0.0;
  double kl = 0.0;         // mean KL(old || current)
  double clip_fraction = 0.0;
};

/// total = -surrogate + value_coef * value - entropy_coef * entropy. When
/// `grad` is given it receives d total / d params (ActorCritic layout).
LossTerms ppo_loss(const ActorCritic& policy, const Minibatch& batch, const PpoConfig& config,
                   VecX* grad);

struct PpoStats {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  double learning_rate = 0.0;
  double grad_norm = 0.0;
  bool aborted = false;
};

/// Several epochs of minibatch steps over a buffer whose advantages have
/// been computed. Advantages are normalized over the whole buffer. A
/// non-finite loss or gradient restores the parameters and optimizer state
/// from before the update and sets `aborted`. When adaptive, `learning_rate`
/// is halved after an update whose mean KL exceeds kl_high and doubled when
/// it falls below kl_low.
PpoStats ppo_update(ActorCritic& policy, Adam& optimizer, const RolloutBuffer& buffer,
                    const PpoConfig& config, double& learning_rate, Rng& rng);

/// Columns `indices` of the buffer, advantages normalized with the given
/// statistics.
Minibatch make_minibatch(const RolloutBuffer& buffer, const std::vector<int>& indices,
                         const VecX& log_std, double adv_mean, double adv_std);

}  // namespace quadtail
