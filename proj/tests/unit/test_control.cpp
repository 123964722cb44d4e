#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "quadtail/common/errors.hpp"
#include "quadtail/control/action.hpp"
#include "quadtail/control/observation.hpp"
#include "quadtail/control/policy.hpp"
#include "quadtail/models/build.hpp"

using namespace quadtail;

TEST_CASE("observation layout") {
  ObservationLayout turning{12, true};
  CHECK(turning.size() == 4 * 12 + 12 + 4);
  ObservationLayout reorient{18, false};
  CHECK(reorient.size() == 4 * 18 + 12);
  CHECK(reorient.command_size() == 0);
  // segments tile [0, size) without gaps or overlap
  std::set<int> seen;
  auto mark = [&](int start, int len) {
    for (int i = start; i < start + len; ++i) CHECK(seen.insert(i).second);
  };
  mark(turning.joint_positions(), 12);
  mark(turning.joint_velocities(), 12);
  mark(turning.history1(), 12);
  mark(turning.history2(), 12);
  mark(turning.angular_velocity(), 3);
  mark(turning.linear_velocity(), 3);
  mark(turning.body_x_axis(), 3);
  mark(turning.body_z_axis(), 3);
  mark(turning.command(), turning.command_size());
  CHECK(static_cast<int>(seen.size()) == turning.size());
}

TEST_CASE("observation contents") {
  const RobotModel model = build_variant(TailVariant::kNone);
  SimState s = nominal_state(model);
  JointHistory h;
  h.reset(s.joint_positions);
  ObservationLayout layout{12, true};
  Command c;
  VecX obs = build_observation(layout, s, h, c);
  CHECK(obs.segment(layout.history1(), 12) == s.joint_positions);
  CHECK(obs.segment(layout.history2(), 12) == s.joint_positions);
  CHECK(obs[layout.command() + 3] == doctest::Approx(1.0));

  // 90 degree yaw: world x velocity becomes body -y, world y becomes body x
  s.base_orientation = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), kPi / 2);
  s.base_linear_velocity = Vec3(1.0, 2.0, 0.0);
  obs = build_observation(layout, s, h, c);
  CHECK(obs[layout.linear_velocity()] == doctest::Approx(2.0));
  CHECK(obs[layout.linear_velocity() + 1] == doctest::Approx(-1.0));
  CHECK(obs[layout.body_x_axis() + 1] == doctest::Approx(1.0));
  // command heading 0 relative to body yaw 90 degrees
  CHECK(obs[layout.command() + 2] == doctest::Approx(-1.0));

  ObservationLayout no_cmd{12, false};
  CHECK(build_observation(no_cmd, s, h, std::nullopt).size() == no_cmd.size());
  CHECK_THROWS_AS(build_observation(no_cmd, s, h, c), PreconditionError);

  VecX p2 = s.joint_positions;
  p2[0] += 0.1;
  h.push(p2);
  CHECK(h.previous == p2);
  CHECK(h.before_previous == s.joint_positions);
}

TEST_CASE("action scaling and PD torque") {
  const RobotModel model = build_variant(TailVariant::kWidowX250S);
  ActionScaling sc{0.3, model.nominal_joints(), model.lower_limits(), model.upper_limits()};
  const int n = model.num_joints();
  CHECK(sc.scale(VecX::Zero(n)) == model.nominal_joints());
  VecX a = VecX::Zero(n);
  a[4] = 1.0;
  CHECK(sc.scale(a)[4] == doctest::Approx(model.nominal_joints()[4] + 0.3));
  a[4] = 1e6;
  a[0] = -1e6;
  const VecX q = sc.scale(a);
  CHECK(q[4] == model.upper_limits()[4]);
  CHECK(q[0] == model.lower_limits()[0]);

  PDGains g;
  const VecX lim = model.torque_limits();
  const VecX z = VecX::Zero(n);
  CHECK(pd_torque(z, z, z, g, lim).isZero(0.0));
  VecX e = z;
  e[2] = 0.1;
  CHECK(pd_torque(e, z, z, g, lim)[2] == doctest::Approx(1.7));
  VecX v = z;
  v[3] = 1.0;
  CHECK(pd_torque(z, z, v, g, lim)[3] == doctest::Approx(-0.4));
  e[2] = 10.0;
  CHECK(pd_torque(e, z, z, g, lim)[2] == doctest::Approx(lim[2]));
  // nominal action at the nominal rest state gives zero torque
  const SimState s = nominal_state(model);
  CHECK(pd_torque(sc.scale(z), s.joint_positions, s.joint_velocities, g, lim).isZero(0.0));
}

TEST_CASE("gaussian helpers") {
  const VecX mean = (VecX(3) << 0.1, -0.2, 0.3).finished();
  const VecX ls = (VecX(3) << -0.1, 0.0, 0.2).finished();
  const double lp = gaussian_log_prob(mean, ls, mean);
  CHECK(lp == doctest::Approx(-ls.sum() - 1.5 * std::log(2 * kPi)).epsilon(1e-14));
  CHECK(gaussian_kl(mean, ls, mean, ls) == doctest::Approx(0.0));
  // one-dimensional closed form
  VecX m0(1), m1(1), s0(1), s1(1);
  m0 << 0.0;
  m1 << 1.0;
  s0 << std::log(1.0);
  s1 << std::log(2.0);
  CHECK(gaussian_kl(m0, s0, m1, s1) == doctest::Approx(std::log(2.0) + (1.0 + 1.0) / 8.0 - 0.5));
}

TEST_CASE("policy forward") {
  PolicyConfig pc;
  pc.actor_hidden = {16, 8};
  pc.critic_hidden = {16};
  ActorCritic p(5, 3, pc, 1);
  CHECK(p.log_std()[0] == doctest::Approx(std::log(0.8)));
  const VecX obs = VecX::LinSpaced(5, -1, 1);

  p.actor().set_parameters(VecX::Zero(p.actor().num_parameters()));
  PolicyOutput o = p.forward(obs, nullptr);
  CHECK(o.mean.isZero(0.0));
  CHECK(o.action == o.mean);
  CHECK(o.log_prob == doctest::Approx(gaussian_log_prob(o.mean, p.log_std(), o.mean)));

  ActorCritic q(5, 3, pc, 2);
  Rng r1(9), r2(9);
  const PolicyOutput a = q.forward(obs, &r1);
  const PolicyOutput b = policy_forward(q, obs, &r2);
  CHECK(a.action == b.action);
  CHECK(a.action != a.mean);
  CHECK_THROWS_AS(q.forward(VecX::Zero(4), nullptr), PreconditionError);

  const VecX flat = q.parameters();
  ActorCritic copy(5, 3, pc, 77);
  copy.set_parameters(flat);
  CHECK(copy.parameters() == flat);
}

TEST_CASE("network outputs stay finite") {
  PolicyConfig pc;
  pc.actor_hidden = {64, 32};
  pc.critic_hidden = {64, 32};
  pc.normalize_observations = false;
  ActorCritic p(20, 6, pc, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  MatX x(20, 1000);
  for (int rep = 0; rep < 100; ++rep) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    CHECK(p.action_mean(x).allFinite());
    CHECK(p.values(x).allFinite());
  }
}

TEST_CASE("observation normalizer merges batches exactly") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(2.0, 3.0);
  MatX all(4, 300);
  for (Eigen::Index i = 0; i < all.size(); ++i) all.data()[i] = n(rng);
  ObservationNormalizer a(4);
  a.update(all.leftCols(100));
  a.update(all.middleCols(100, 150));
  a.update(all.rightCols(50));
  const VecX mean = all.rowwise().mean();
  const VecX var = (all.colwise() - mean).array().square().rowwise().mean();
  CHECK((a.mean() - mean).norm() < 1e-12);
  CHECK((a.variance() - var).norm() < 1e-10);
  CHECK(a.count() == 300);
  const VecX big = VecX::Constant(4, 1e6);
  CHECK(a.normalize(big).maxCoeff() == ObservationNormalizer::kClip);
}

TEST_CASE("MLP backward matches finite differences") {
  for (Activation act : {Activation::kTanh, Activation::kElu}) {
    Mlp net({4, 7, 5, 2}, act);
    net.initialize(3, 1.0);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n;
    MatX x(4, 6), w(2, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = n(rng);
    // L = sum(w .* f(x))
    Mlp::Cache cache;
    net.forward(x, cache);
    VecX g = VecX::Zero(net.num_parameters());
    const MatX gx = net.backward(cache, w, g);
    const VecX p0 = net.parameters();
    const double h = 1e-6;
    for (int i = 0; i < net.num_parameters(); ++i) {
      VecX p = p0;
      p[i] += h;
      net.set_parameters(p);
      const double lp = net.forward(x).cwiseProduct(w).sum();
      p[i] -= 2 * h;
      net.set_parameters(p);
      const double lm = net.forward(x).cwiseProduct(w).sum();
      CHECK(g[i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    net.set_parameters(p0);
    MatX xp = x;
    xp(2, 3) += h;
    MatX xm = x;
    xm(2, 3) -= h;
    const double fd = (net.forward(xp).cwiseProduct(w).sum() - net.forward(xm).cwiseProduct(w).sum()) / (2 * h);
    CHECK(gx(2, 3) == doctest::Approx(fd).epsilon(1e-6));
  }
}
