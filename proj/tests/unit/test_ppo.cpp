#include <doctest.h>

#include <cmath>

#include "ppo_oracles.hpp"
#include "quadtail/common/errors.hpp"
#include "quadtail/ppo/learner.hpp"
#include "quadtail/ppo/toy_env.hpp"

using namespace quadtail;

namespace {

RolloutBuffer constant_buffer(int horizon, double reward, double value) {
  RolloutBuffer b(1, horizon, 1, 1);
  b.rewards.setConstant(reward);
  b.values.setConstant(value);
  b.last_values.setConstant(value);
  b.filled = horizon;
  return b;
}

/// One-step bandit: reward -(a - 0.7)^2, every step ends the episode.
class Bandit : public VecEnv {
 public:
  explicit Bandit(int n) : n_(n) {}
  int num_envs() const override { return n_; }
  int obs_dim() const override { return 1; }
  int act_dim() const override { return 1; }
  MatX reset(std::uint64_t) override { return MatX::Ones(1, n_); }
  VecStepResult step(const MatX& a) override {
    VecStepResult r;
    r.rewards = (-(a.row(0).array() - 0.7).square()).matrix().transpose();
    r.ends.assign(n_, EpisodeEnd::kTerminated);
    r.observations = MatX::Ones(1, n_);
    r.final_observations = r.observations;
    return r;
  }

 private:
  int n_;
};

PolicyConfig small_config() {
  PolicyConfig pc;
  pc.actor_hidden = {16, 16};
  pc.critic_hidden = {16, 16};
  return pc;
}

}  // namespace

TEST_CASE("GAE examples") {
  // gamma = 0: one-step advantage
  RolloutBuffer b = constant_buffer(5, 1.0, 0.25);
  compute_gae(b, 0.0, 0.7);
  for (int t = 0; t < 5; ++t) CHECK(b.advantages[t] == doctest::Approx(0.75));

  // constant reward, V = 0, lambda = 1: geometric series toward 1 / (1 - gamma)
  RolloutBuffer g = constant_buffer(3000, 1.0, 0.0);
  compute_gae(g, 0.99, 1.0);
  CHECK(g.advantages[0] == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(g.advantages[2999] == doctest::Approx(1.0));

  // no bootstrapping across an ended episode
  RolloutBuffer d = constant_buffer(4, 1.0, 5.0);
  d.ends[1] = EpisodeEnd::kTerminated;
  compute_gae(d, 0.9, 0.95);
  CHECK(d.advantages[1] == doctest::Approx(1.0 - 5.0));
  CHECK(d.returns[1] == doctest::Approx(1.0));
  const double delta0 = 1.0 + 0.9 * 5.0 - 5.0;
  CHECK(d.advantages[0] == doctest::Approx(delta0 + 0.9 * 0.95 * (1.0 - 5.0)));
}

TEST_CASE("surrogate gradient matches finite differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = oracle::surrogate_gradient_check(seed);
    CHECK(r.relative_error < 1e-4);
    CHECK(r.clip_fraction > 0.0);
  }
}

TEST_CASE("ratio one: surrogate gradient is the policy gradient") {
  PolicyConfig pc = small_config();
  pc.normalize_observations = false;
  ActorCritic p(2, 1, pc, 4);
  Minibatch mb;
  mb.observations = MatX::Random(2, 8);
  mb.old_means = p.action_mean(mb.observations);
  mb.old_log_std = p.log_std();
  mb.actions = mb.old_means.array() + 0.5;
  mb.old_log_probs.resize(8);
  for (int i = 0; i < 8; ++i)
    mb.old_log_probs[i] = gaussian_log_prob(mb.old_means.col(i), p.log_std(), mb.actions.col(i));
  mb.advantages = VecX::LinSpaced(8, -1, 1);
  mb.returns = VecX::Zero(8);
  PpoConfig c;
  c.value_coef = 0.0;
  VecX grad;
  const LossTerms l = ppo_loss(p, mb, c, &grad);
  CHECK(l.clip_fraction == 0.0);
  CHECK(l.kl == doctest::Approx(0.0));
  // d/dmean of -mean(A * logp) = -A (a - mean) / var / B
  const double var = std::exp(2.0 * p.log_std()[0]);
  double expected = 0.0;
  for (int i = 0; i < 8; ++i) expected -= mb.advantages[i] * 0.5 / var / 8.0;
  // bias of the output layer receives d loss / d mean summed over the batch
  const int out_bias = p.actor().num_parameters() - 1;
  CHECK(grad[out_bias] == doctest::Approx(expected));
}

TEST_CASE("clipped sample contributes no gradient") {
  PolicyConfig pc = small_config();
  pc.normalize_observations = false;
  ActorCritic p(2, 1, pc, 5);
  Minibatch mb;
  mb.observations = MatX::Random(2, 1);
  mb.old_means = p.action_mean(mb.observations);
  mb.old_log_std = p.log_std();
  mb.actions = mb.old_means.array() + 0.3;
  // old log-prob far below the current one: ratio >> 1 + clip
  mb.old_log_probs = VecX::Constant(1, gaussian_log_prob(mb.old_means.col(0), p.log_std(), mb.actions.col(0)) - 1.0);
  mb.advantages = VecX::Ones(1);
  mb.returns = VecX::Zero(1);
  PpoConfig c;
  c.value_coef = 0.0;
  VecX grad;
  const LossTerms l = ppo_loss(p, mb, c, &grad);
  CHECK(l.clip_fraction == 1.0);
  CHECK(grad.segment(0, p.critic_offset()).isZero(0.0));
  mb.advantages = -VecX::Ones(1);  // negative advantage: unclipped term is the minimum
  ppo_loss(p, mb, c, &grad);
  CHECK_FALSE(grad.segment(0, p.critic_offset()).isZero(0.0));
}

TEST_CASE("value regression on a frozen buffer decreases the value loss") {
  PolicyConfig pc = small_config();
  ActorCritic p(2, 1, pc, 6);
  Minibatch mb;
  mb.observations = MatX::Random(2, 64);
  mb.old_means = p.action_mean(mb.observations);
  mb.old_log_std = p.log_std();
  mb.actions = mb.old_means;
  mb.old_log_probs.resize(64);
  for (int i = 0; i < 64; ++i)
    mb.old_log_probs[i] = gaussian_log_prob(mb.old_means.col(i), p.log_std(), mb.actions.col(i));
  mb.advantages = VecX::Zero(64);
  mb.returns = (mb.observations.row(0).array() * 2.0 - mb.observations.row(1).array()).matrix().transpose();
  PpoConfig c;
  Adam adam(p.num_parameters());
  double prev = ppo_loss(p, mb, c, nullptr).value;
  for (int k = 0; k < 50; ++k) {
    VecX grad;
    ppo_loss(p, mb, c, &grad);
    VecX theta = p.parameters();
    adam.step(theta, grad, 1e-3);
    p.set_parameters(theta);
    const double v = ppo_loss(p, mb, c, nullptr).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("bandit: mean action moves toward the optimum") {
  Bandit env(32);
  PpoConfig c;
  c.num_envs = 32;
  c.horizon = 8;
  PpoLearner learner(env, ActorCritic(1, 1, small_config(), 7), c, 7);
  const double start = learner.policy().forward(VecX::Ones(1), nullptr).mean[0];
  for (int i = 0; i < 60; ++i) learner.iterate();
  const double end = learner.policy().forward(VecX::Ones(1), nullptr).mean[0];
  CHECK(std::abs(end - 0.7) < 0.5 * std::abs(start - 0.7));
  CHECK(std::abs(end - 0.7) < 0.1);
}

TEST_CASE("collection: shapes, auto-reset and determinism") {
  ToyVelocityEnv env(1, 3);
  ActorCritic p(2, 1, small_config(), 8);
  Collector col;
  col.reset(env, 1);
  RolloutBuffer one(1, 1, 2, 1);
  collect_rollouts(env, p, col, one, 0.99);
  CHECK(one.filled == 1);
  CHECK(one.capacity() == 1);

  auto run = [&](std::uint64_t seed) {
    ToyVelocityEnv e(4, 5);
    Collector c;
    c.reset(e, seed);
    RolloutBuffer b(4, 12, 2, 1);
    const CollectStats s = collect_rollouts(e, p, c, b, 0.99);
    CHECK(s.finished_episodes == 8);  // 12 steps of 5-step episodes, 4 envs
    CHECK(s.truncations == 8);
    return b;
  };
  const RolloutBuffer a = run(3);
  const RolloutBuffer b = run(3);
  CHECK(a.observations == b.observations);
  CHECK(a.actions == b.actions);
  CHECK(a.rewards == b.rewards);
  const RolloutBuffer c = run(4);
  CHECK(a.actions != c.actions);
  // episode boundary: env keeps filling after the reset at t = 5
  CHECK(a.ends[a.index(4, 0)] == EpisodeEnd::kTruncated);
  CHECK(a.observations(0, a.index(5, 0)) == 0.0);
}

TEST_CASE("non-finite update restores the parameters") {
  ToyVelocityEnv env(4);
  PpoConfig c;
  c.num_envs = 4;
  c.horizon = 10;
  PolicyConfig pc = small_config();
  ActorCritic p(2, 1, pc, 9);
  Collector col;
  col.reset(env, 1);
  RolloutBuffer b(4, 10, 2, 1);
  collect_rollouts(env, p, col, b, 0.99);
  compute_gae(b, 0.99, 0.95);
  b.returns[3] = std::nan("");
  Adam adam(p.num_parameters());
  const VecX before = p.parameters();
  double lr = 1e-3;
  Rng rng(1);
  const PpoStats s = ppo_update(p, adam, b, c, lr, rng);
  CHECK(s.aborted);
  CHECK(p.parameters() == before);
  CHECK(adam.steps() == 0);
}

TEST_CASE("ppo config validation names the field") {
  const YAML::Node n = YAML::Load("ppo:\n  clip: 1.5\n");
  try {
    ppo_config_from_config(n);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "ppo.clip");
  }
}
