#include <doctest.h>

#include <cmath>

#include "quadtail/common/errors.hpp"
#include "quadtail/envs/evaluation.hpp"
#include "quadtail/models/build.hpp"

using namespace quadtail;

namespace {

std::shared_ptr<const RobotModel> robot(TailVariant v = TailVariant::kNone) {
  static std::map<TailVariant, std::shared_ptr<const RobotModel>> cache;
  auto& m = cache[v];
  if (!m) m = std::make_shared<const RobotModel>(build_variant(v));
  return m;
}

VecX zeros(int n) { return VecX::Zero(n); }

VecX values(std::initializer_list<double> v) {
  VecX out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const CurriculumState kNoCurriculum = CurriculumState::initial(CurriculumKind::kNone);

}  // namespace

TEST_CASE("termination rules fire strictly above their squared-norm limits") {
  const TerminationRules rules;
  const VecX z = zeros(3);
  CHECK_FALSE(check_termination(false, z, z, z, z, z, rules));

  // smoothness: |dq|^2 = 2 exactly, then 2.01
  CHECK_FALSE(check_termination(false, z, values({1, 1, 0}), z, z, z, rules));
  CHECK(check_termination(false, z, values({1, 1, 0.1}), z, z, z, rules) == TerminationReason::kSmoothness);
  // torque: 144 + 36 = 180, then 100 + 81 = 181
  CHECK_FALSE(check_termination(false, values({12, 6, 0}), z, z, z, z, rules));
  CHECK(check_termination(false, values({10, 9, 0}), z, z, z, z, rules) == TerminationReason::kTorque);
  // joint deviation: 4 + 1 = 5, then 5.25
  CHECK_FALSE(check_termination(false, z, z, z, values({2, 1, 0}), z, rules));
  CHECK(check_termination(false, z, z, z, values({2, 1, 0.5}), z, rules) == TerminationReason::kJointPosition);
  // deviation is measured from the nominal pose
  CHECK_FALSE(check_termination(false, z, z, z, values({3, 1, 0}), values({1, 0, 0}), rules));
  CHECK(check_termination(true, z, z, z, z, z, rules) == TerminationReason::kBodyCollision);

  TerminationRules off = rules;
  off.body_collision = false;
  CHECK_FALSE(check_termination(true, z, z, z, z, z, off));
}

TEST_CASE("collision rule sees the base box but not the feet") {
  const auto m = robot();
  SimState s = nominal_state(*m);
  CHECK_FALSE(body_ground_contact(m->tree, s, forward_kinematics(m->tree, s)));
  s.base_position.z() = 0.03;
  CHECK(body_ground_contact(m->tree, s, forward_kinematics(m->tree, s)));
}

TEST_CASE("disturbance force is impulse over window and moves momentum by the impulse") {
  DisturbanceSpec d;
  d.magnitude = 100.0;
  d.window = 0.2;
  d.onset = 1.0;
  CHECK(d.force_at(1.1).norm() == doctest::Approx(500.0));
  CHECK(d.force_at(0.99).norm() == 0.0);
  CHECK(d.force_at(1.2).norm() == 0.0);

  const auto m = robot();
  SimState s = nominal_state(*m);
  s.base_position.z() = 5.0;
  StepOptions opt;
  opt.gravity = Vec3::Zero();
  opt.contacts = false;
  const Vec3 before = com_momentum(m->tree, s).linear;
  for (int k = 0; k < 200; ++k) {
    const Kinematics kin = forward_kinematics(m->tree, s);
    const Vec3 com = kin.links[0].rotation * m->tree.link(0).inertia.com() + kin.links[0].position;
    const ExternalForce f{0, 500.0 * Vec3::UnitY(), com};
    s = step(m->tree, s, zeros(m->num_joints()), std::span<const ExternalForce>(&f, 1), 1e-3, opt);
  }
  const Vec3 change = com_momentum(m->tree, s).linear - before;
  CHECK(std::abs(change.y() - 100.0) < 1.0);
  CHECK(std::abs(change.x()) < 1.0);
}

TEST_CASE("turning reset puts the feet on the ground") {
  for (auto v : {TailVariant::kNone, TailVariant::kViperX300S}) {
    for (bool noise : {false, true}) {
      EnvConfig cfg;
      Environment env(robot(v), cfg);
      Rng rng(3);
      ResetOverrides o;
      o.no_joint_noise = !noise;
      env.reset(rng, CurriculumState::initial(CurriculumKind::kStage1), o);
      CHECK(env.obs_dim() == 4 * robot(v)->num_joints() + 16);
      StepOptions opt;
      SimState s = env.state();
      StepDiagnostics diag;
      for (int k = 0; k < 2; ++k)
        s = step(robot(v)->tree, s, zeros(robot(v)->num_joints()), {}, 1e-3, opt, &diag);
      const auto touching = std::count(diag.foot_contact.begin(), diag.foot_contact.end(), true);
      // with noise only the lowest foot is guaranteed to touch
      if (!noise) CHECK(touching == 4);
      CHECK(touching >= 1);
    }
  }
}

TEST_CASE("reorientation reset samples drops inside the configured ranges") {
  EnvConfig cfg;
  cfg.task = Task::kReorientation;
  Environment env(robot(TailVariant::kWidowX250S), cfg);
  CHECK(env.obs_dim() == 4 * 18 + 12);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    env.reset(rng, kNoCurriculum);
    const double z = env.state().base_position.z();
    const double tilt = tilt_angle(env.state().base_orientation.rotation_matrix());
    CHECK(z >= 1.5);
    CHECK(z <= 2.25);
    CHECK(tilt >= deg_to_rad(90.0) - 1e-9);
    CHECK(tilt <= deg_to_rad(120.0) + 1e-9);
    // nose up: body x points upward
    CHECK(env.state().base_orientation.rotation_matrix()(2, 0) > 0.8);
  }
}

TEST_CASE("aerial-only episodes end when the base reaches the split height") {
  EnvConfig cfg;
  cfg.task = Task::kReorientation;
  cfg.aerial_only = true;
  Environment env(robot(), cfg);
  Rng rng(5);
  ResetOverrides o;
  o.drop_height = 1.5;
  o.no_joint_noise = true;
  env.reset(rng, kNoCurriculum, o);
  StepInfo info;
  double last_z = env.state().base_position.z();
  while (!env.done()) {
    last_z = env.state().base_position.z();
    env.step(zeros(env.act_dim()), info);
    if (!env.done()) CHECK(info.region == ReorientRegion::kAir);
  }
  CHECK(info.end == EpisodeEnd::kTerminated);
  CHECK(info.reason == TerminationReason::kAerialPhaseEnd);
  CHECK(last_z > kAirRegionHeight);
  CHECK(env.state().base_position.z() <= kAirRegionHeight);
  CHECK(info.reward.total == compose_total(info.reward.r_pos, info.reward.r_neg, cfg.rewards.reward_factor));
  // free fall from 1.5 m to 0.4 m takes about 0.47 s
  CHECK(env.time() == doctest::Approx(std::sqrt(2.0 * 1.1 / 9.81)).epsilon(0.05));
}

TEST_CASE("turning command switches from run to turn exactly at the onset") {
  EnvConfig cfg;
  cfg.stage = 2;
  cfg.termination.body_collision = false;
  cfg.termination.torque_limit = 1e9;
  cfg.termination.joint_limit = 1e9;
  Environment env(robot(), cfg);
  Rng rng(2);
  ResetOverrides o;
  o.onset_time = 0.3;
  o.turn_angle = deg_to_rad(90.0);
  o.speed = 1.0;
  env.reset(rng, CurriculumState::initial(CurriculumKind::kStage2), o);
  StepInfo info;
  for (int k = 0; k < 50; ++k) {
    env.step(zeros(env.act_dim()), info);
    const bool after = env.time() >= 0.3 - 1e-9;
    CHECK((info.command.section == TurnSection::kTurn) == after);
    CHECK(info.command.heading == doctest::Approx(after ? kPi / 2 : 0.0));
    if (!after) CHECK(info.reward.r_w == 0.0);
  }
}

TEST_CASE("termination replaces the step reward with the penalty") {
  EnvConfig cfg;
  cfg.task = Task::kBalancing;
  Environment env(robot(), cfg);
  Rng rng(4);
  env.reset(rng, kNoCurriculum);
  StepInfo info;
  VecX a = VecX::Constant(env.act_dim(), 4.0);  // |dq_des|^2 = 12 * 1.2^2 > 2
  env.step(a, info);
  CHECK(info.end == EpisodeEnd::kTerminated);
  CHECK(info.reason == TerminationReason::kSmoothness);
  CHECK(info.reward.total == cfg.termination.penalty);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(a, info), PreconditionError);
}

TEST_CASE("time limit truncates without penalty") {
  EnvConfig cfg;
  cfg.task = Task::kBalancing;
  cfg.balance_duration = 0.05;
  Environment env(robot(), cfg);
  Rng rng(4);
  ResetOverrides o;
  o.no_disturbance = true;
  env.reset(rng, kNoCurriculum, o);
  StepInfo info;
  int steps = 0;
  while (!env.done()) {
    env.step(zeros(env.act_dim()), info);
    ++steps;
  }
  CHECK(steps == 5);
  CHECK(info.end == EpisodeEnd::kTruncated);
  CHECK(info.reward.total != cfg.termination.penalty);
}

TEST_CASE("zero impulse leaves the balancing trajectory unchanged") {
  EnvConfig cfg;
  cfg.task = Task::kBalancing;
  Environment a(robot(), cfg), b(robot(), cfg);
  Rng ra(8), rb(8);
  ResetOverrides oa, ob;
  oa.no_disturbance = true;
  DisturbanceSpec d;
  d.magnitude = 0.0;
  d.onset = 0.05;
  ob.disturbance = d;
  a.reset(ra, kNoCurriculum, oa);
  b.reset(rb, kNoCurriculum, ob);
  StepInfo ia, ib;
  for (int k = 0; k < 10 && !a.done(); ++k) {
    a.step(zeros(a.act_dim()), ia);
    b.step(zeros(b.act_dim()), ib);
    CHECK(a.state().base_position == b.state().base_position);
  }
}

TEST_CASE("vector environment is reproducible and independent of thread count") {
  EnvConfig cfg;
  cfg.task = Task::kBalancing;
  TaskVecEnv one(robot(), cfg, 6, 1), three(robot(), cfg, 6, 3);
  CHECK(one.info_names() == RewardBreakdown::term_names());
  const MatX o1 = one.reset(21), o3 = three.reset(21);
  CHECK(o1 == o3);
  Rng rng(1);
  for (int k = 0; k < 30; ++k) {
    MatX act(one.act_dim(), one.num_envs());
    for (Eigen::Index i = 0; i < act.size(); ++i) act.data()[i] = 0.3 * standard_normal(rng);
    const VecStepResult r1 = one.step(act), r3 = three.step(act);
    CHECK(r1.rewards == r3.rewards);
    CHECK(r1.observations == r3.observations);
    CHECK(r1.ends == r3.ends);
    CHECK(r1.info == r3.info);
  }
}

TEST_CASE("environment config round trips and reports bad fields") {
  EnvConfig c;
  c.task = Task::kReorientation;
  c.aerial_only = true;
  c.drop_min_tilt = deg_to_rad(95.0);
  c.termination.penalty = -20.0;
  c.rewards.ground.k_arm = -120.0;
  YAML::Node root;
  write_env_config(root, c);
  const EnvConfig back = env_config_from_config(root);
  CHECK(back.task == Task::kReorientation);
  CHECK(back.aerial_only);
  CHECK(back.drop_min_tilt == doctest::Approx(c.drop_min_tilt));
  CHECK(back.termination.penalty == -20.0);
  CHECK(back.rewards.ground.k_arm == -120.0);

  root["env"]["substeps"] = 0;
  try {
    env_config_from_config(root);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "env.substeps");
  }
  YAML::Node bad;
  bad["task"] = "swimming";
  CHECK_THROWS_AS(env_config_from_config(bad), ConfigError);
}

TEST_CASE("trajectory dots come every 0.05 s") {
  EpisodeLog log;
  for (int k = 1; k <= 100; ++k) {
    EpisodeRow r;
    r.time = 0.01 * k;
    r.position = Vec3(r.time, 0.0, 0.3);
    log.rows.push_back(r);
  }
  const auto dots = trajectory_dots(log);
  REQUIRE(dots.size() == 21);
  for (std::size_t i = 0; i < dots.size(); ++i) CHECK(dots[i].time == doctest::Approx(0.05 * i));
}

TEST_CASE("turning metrics against a hand-made path") {
  // straight along x at 1 m/s until 1 s, then a 90 degree arc of radius 0.5
  TurnSchedule sch;
  sch.turn_angle = kPi / 2;
  sch.onset_time = 1.0;
  sch.speed = 1.0;
  EpisodeLog log;
  log.end = EpisodeEnd::kTruncated;
  for (int k = 1; k <= 300; ++k) {
    EpisodeRow r;
    r.time = 0.01 * k;
    const double t = r.time;
    if (t <= 1.0) {
      r.position = Vec3(t, 0.0, 0.3);
    } else {
      const double phi = std::min((t - 1.0) / 0.5, kPi / 2);
      const double rest = std::max(0.0, (t - 1.0) - 0.5 * kPi / 2);
      r.position = Vec3(1.0 + 0.5 * std::sin(phi), 0.5 - 0.5 * std::cos(phi) + rest, 0.3);
      r.rpy.z() = phi;
    }
    log.rows.push_back(r);
  }
  const TurningMetrics m = turning_metrics(log, sch);
  // ideal path runs up the line x = 1, the arc peaks at x = 1.5
  CHECK(m.peak_lateral_displacement == doctest::Approx(0.5).epsilon(1e-3));
  // heading within 10 degrees once phi >= 80 degrees
  CHECK(m.completion_time == doctest::Approx(0.5 * deg_to_rad(80.0)).epsilon(0.02));
  CHECK(m.survived);
}

TEST_CASE("reorientation metrics read the aerial minimum") {
  EpisodeLog log;
  log.initial.tilt = 1.8;
  log.initial.position.z() = 2.0;
  log.initial.contact.assign(4, false);
  const double tilts[] = {1.7, 1.2, 1.0, 0.9, 0.5};
  const double heights[] = {1.5, 1.0, 0.6, 0.35, 0.3};
  for (int k = 0; k < 5; ++k) {
    EpisodeRow r;
    r.time = 0.1 * (k + 1);
    r.tilt = tilts[k];
    r.position.z() = heights[k];
    r.region = region_for_height(heights[k]);
    r.contact.assign(4, k == 4);
    log.rows.push_back(r);
  }
  const ReorientMetrics m = reorient_metrics(log);
  CHECK(m.min_aerial_tilt == 1.0);
  CHECK(m.achieved_rotation == doctest::Approx(0.8));
  CHECK(m.window_rotation == doctest::Approx(0.8));
  CHECK(reorient_metrics(log, 0.2).window_rotation == doctest::Approx(0.6));
  CHECK(m.touchdown_time == doctest::Approx(0.5));
  CHECK(m.tilt_at_touchdown == 0.5);
  CHECK(tilt_series(log, 0.3).size() == 4);
}
