// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1). `--only name[,name]` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ppo_oracles.hpp"
#include "quadtail/curriculum/curriculum.hpp"
#include "quadtail/envs/termination.hpp"
#include "quadtail/models/build.hpp"
#include "quadtail/ppo/learner.hpp"
#include "quadtail/ppo/toy_env.hpp"
#include "quadtail/trainer/trainer.hpp"
#include "reward_oracles.hpp"

namespace fs = std::filesystem;
using namespace quadtail;

namespace {

// Tolerances and budgets.
constexpr int kRewardSamples = 200;
constexpr double kRewardTolerance = 1e-9;
constexpr double kCompositionTolerance = 1e-12;
constexpr double kMomentumDriftLimit = 1e-3;
constexpr double kHalvingLow = 0.4;
constexpr double kHalvingHigh = 0.6;
constexpr double kPendulumTolerance = 0.01;
constexpr int kMassMatrixConfigs = 100;
constexpr double kMassMatrixTolerance = 1e-6;
constexpr double kGradientTolerance = 1e-4;
constexpr int kToyIterations = 200;
constexpr double kToyImprovement = 1.5;
constexpr int kOrderingDrops = 50;
constexpr int kOrderingMaxIterations = 1500;
constexpr double kNoTailCeilingDeg = 25.0;
constexpr int kOrderingSeedsRequired = 2;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "quadtail_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

FootContactTracker random_tracker(std::mt19937_64& rng) {
  FootContactTracker t(4);
  std::vector<bool> flags(4);
  for (int f = 0; f < 4; ++f) flags[f] = rng() & 1;
  t.reset(flags);
  const int steps = static_cast<int>(rng() % 60) + 1;
  for (int k = 0; k < steps; ++k) {
    for (int f = 0; f < 4; ++f) {
      if (rng() % 8 == 0) flags[f] = !flags[f];
    }
    t.update(flags, 0.01);
  }
  return t;
}

VecX random_vec(std::mt19937_64& rng, int n, double scale) {
  return VecX::NullaryExpr(n, [&] { return oracle::draw(rng, -scale, scale); });
}

double sum_sq(const VecX& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return s;
}

// ---------------------------------------------------------------------------

void reward_golden(Outcome& o) {
  std::mt19937_64 rng(2024);
  RewardCoefficients k;
  double worst = 0.0, worst_compose = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, rel_err(got, want)); };

  for (int i = 0; i < kRewardSamples; ++i) {
    // general terms
    const VecX p = random_vec(rng, 12, 1.5), pd = random_vec(rng, 12, 10.0), tau = random_vec(rng, 12, 20.0);
    const VecX qd = random_vec(rng, 12, 1.5), qp = random_vec(rng, 12, 1.5), nom = random_vec(rng, 12, 1.0);
    const GeneralTerms g = general_constraint_reward(p, pd, tau, qd, qp, nom, k.general);
    track(g.r_p, k.general.k_p * sum_sq(p - nom));
    track(g.r_pdot, k.general.k_pdot * sum_sq(pd));
    track(g.r_tau, k.general.k_tau * sum_sq(tau));
    track(g.r_s, k.general.k_s * sum_sq(qd - qp));

    // turning table
    const RewardSignals s = oracle::random_signals(rng, i % 2 == 0);
    const Command c = oracle::random_command(rng);
    const FootContactTracker tr = random_tracker(rng);
    std::vector<std::pair<double, double>> phases;
    for (const FootPhase& f : tr.feet()) phases.emplace_back(f.stance_time, f.air_time);
    const TurningCoefficients& col = c.section == TurnSection::kRun ? k.run : k.turn;
    const auto t = oracle::turning(s, c, phases, col, k.foot_clearance_threshold);
    RewardBreakdown b;
    turning_reward(s, c, tr, k, b);
    track(b.r_v, t.r_v);
    track(b.r_phi, t.r_phi);
    track(b.r_w, t.r_w);
    track(b.r_air, t.r_air);
    track(b.r_cl, t.r_cl);
    track(b.r_base, t.r_base);
    track(b.r_ori, t.r_ori);
    track(b.r_arm, t.r_arm);

    // composition with the general terms attached
    b.general = g;
    b.compose(k.reward_factor);
    const double pos = t.r_v + t.r_phi + t.r_w + t.r_air;
    const double neg = t.r_cl + t.r_base + t.r_ori + t.r_arm + g.r_p + g.r_pdot + g.r_tau + g.r_s;
    worst_compose = std::max(worst_compose, std::abs(b.total - compose_total(b.r_pos, b.r_neg, k.reward_factor)));
    track(b.total, pos * std::exp(k.reward_factor * neg));

    // reorientation tables
    const RewardSignals r = oracle::random_signals(rng, i % 3 != 0);
    const ReorientRegion region = region_for_height(r.base_position.z());
    const ReorientCoefficients& rc = region == ReorientRegion::kAir ? k.air : k.ground;
    const double h_ref = 0.3;
    const auto ro = oracle::reorient(r, rc, h_ref, k.foot_clearance_threshold);
    RewardBreakdown rb;
    reorient_reward(r, region, h_ref, k, rb);
    track(rb.r_ori, ro.r_ori);
    track(rb.r_v, ro.r_v);
    track(rb.r_h, ro.r_h);
    track(rb.r_cl, ro.r_cl);
    track(rb.r_arm, ro.r_arm);
    rb.compose(k.reward_factor);
    worst_compose = std::max(worst_compose, std::abs(rb.total - compose_total(rb.r_pos, rb.r_neg, k.reward_factor)));
  }
  o.detail << "samples/term=" << kRewardSamples << " worst_rel=" << worst << " composition=" << worst_compose << " ";
  o.require(worst <= kRewardTolerance, "term oracle");
  o.require(worst_compose <= kCompositionTolerance, "composition identity");
}

void curriculum_exact(Outcome& o) {
  const double v500 = stage1_velocity(500), v_inf1 = stage1_velocity(1000000);
  const double v100 = stage2_velocity(100), v_inf2 = stage2_velocity(1000000);
  o.detail << "v1(500)=" << v500 << " v1(inf)=" << v_inf1 << " v2(100)=" << v100 << " v2(inf)=" << v_inf2
           << " range=" << command_range(0) << "," << command_range(300) << "," << command_range(1000000) << " ";
  o.require(v500 == 1.75, "stage-1 midpoint");
  o.require(v_inf1 == 2.5, "stage-1 asymptote");
  o.require(v100 == 1.77 + 2.73 / 2.0 && std::abs(v100 - 3.135) < 1e-15, "stage-2 midpoint");
  o.require(v_inf2 == 4.5, "stage-2 asymptote");
  o.require(command_range(0) == 1 && command_range(300) == 301 && command_range(1000000) == 301, "command range");
  const CurriculumState s = CurriculumState::initial(CurriculumKind::kStage2);
  o.require(advance(s, 4.75).reward_step == 0, "threshold is strict");
  o.require(advance(s, std::nextafter(4.75, 5.0)).reward_step == 1, "above threshold advances");
}

// Maximum relative drift of the COM angular momentum over 1 s of flight
// with PD torques chasing random targets.
double momentum_drift(const RobotModel& model, double dt, std::uint64_t seed, bool conserve) {
  std::mt19937_64 rng(seed);
  SimState s = nominal_state(model);
  s.base_position.z() = 10.0;
  for (int i = 0; i < 3; ++i) s.base_angular_velocity[i] = testing::uniform(rng, -1, 1);
  for (int j = 0; j < model.num_joints(); ++j) s.joint_velocities[j] = testing::uniform(rng, -1, 1);
  StepOptions options;
  options.contacts = false;
  options.conserve_momentum = conserve;
  const Vec3 l0 = com_momentum(model.tree, s).angular;
  VecX target = model.nominal_joints();
  double worst = 0.0;
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  const int hold = static_cast<int>(std::lround(0.05 / dt));
  for (int i = 0; i < steps; ++i) {
    if (i % hold == 0) {
      for (int j = 0; j < target.size(); ++j) target[j] = model.nominal_joints()[j] + testing::uniform(rng, -0.3, 0.3);
    }
    const VecX tau = (17.0 * (target - s.joint_positions) - 0.4 * s.joint_velocities).cwiseMax(-17.0).cwiseMin(17.0);
    s = step(model.tree, s, tau, {}, dt, options);
    worst = std::max(worst, (com_momentum(model.tree, s).angular - l0).norm() / l0.norm());
  }
  return worst;
}

double pendulum_period(double dt) {
  const double l = 0.5, heavy = 1e6, g = 9.81;
  Link base;
  base.name = "base";
  base.joint = JointType::kFloating;
  base.inertia = SpatialInertia::box(heavy, Vec3(0.2, 0.2, 0.2));
  KinematicTree t(base, Vec3(0.2, 0.2, 0.2));
  Link bob;
  bob.name = "bob";
  bob.parent = 0;
  bob.axis = Vec3::UnitY();
  bob.inertia = SpatialInertia::point_mass(1.0, Vec3(0, 0, -l));
  t.add_link(bob);
  SimState s = SimState::zeros(1);
  s.joint_positions[0] = 0.02;
  const ExternalForce hold{0, Vec3(0, 0, heavy * g), Vec3::Zero()};
  StepOptions options;
  options.contacts = false;
  std::vector<double> crossings;
  double prev = s.joint_positions[0];
  for (int i = 0; i < static_cast<int>(8.0 / dt) && crossings.size() < 7; ++i) {
    s = step(t, s, VecX::Zero(1), std::span<const ExternalForce>(&hold, 1), dt, options);
    const double cur = s.joint_positions[0];
    if ((prev > 0.0) != (cur > 0.0)) crossings.push_back(s.time - dt * cur / (cur - prev));
    prev = cur;
  }
  if (crossings.size() < 7) return 0.0;
  return (crossings[6] - crossings[0]) / 3.0;
}

void dynamics_conservation(Outcome& o) {
  const RobotModel viper = build_variant(TailVariant::kViperX300S);
  double worst = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) worst = std::max(worst, momentum_drift(viper, 1e-3, seed, true));
  const double plain_coarse = momentum_drift(viper, 1e-3, 1, false);
  const double plain_fine = momentum_drift(viper, 5e-4, 1, false);
  const double ratio = plain_fine / plain_coarse;
  o.detail << "drift=" << worst << " plain(1e-3)=" << plain_coarse << " plain(5e-4)=" << plain_fine
           << " ratio=" << ratio << " ";
  o.require(worst < kMomentumDriftLimit, "momentum drift");
  o.require(ratio > kHalvingLow && ratio < kHalvingHigh, "first-order drift reduction");

  const double analytic = 2.0 * kPi * std::sqrt(0.5 / 9.81);
  const double period = pendulum_period(1e-3);
  o.detail << "period=" << period << " analytic=" << analytic << " ";
  o.require(std::abs(period - analytic) < kPendulumTolerance * analytic, "pendulum period");

  std::mt19937_64 rng(77);
  double mm = 0.0;
  for (int i = 0; i < kMassMatrixConfigs; ++i) {
    const SimState s = testing::random_state(viper.tree, rng);
    mm = std::max(mm, (mass_matrix(viper.tree, s) - testing::mass_matrix_oracle(viper.tree, s)).cwiseAbs().maxCoeff());
  }
  o.detail << "mass_matrix_err=" << mm << " ";
  o.require(mm < kMassMatrixTolerance, "mass matrix");
}

void termination_table(Outcome& o) {
  const TerminationRules rules;
  const VecX z = VecX::Zero(3);
  auto v = [](double a, double b, double c) { return VecX(Vec3(a, b, c)); };
  int checked = 0;
  auto expect = [&](std::optional<TerminationReason> got, std::optional<TerminationReason> want, const char* what) {
    ++checked;
    o.require(got == want, what);
  };
  expect(check_termination(false, z, z, z, z, z, rules), std::nullopt, "nothing");
  expect(check_termination(false, z, v(1, 1, 0), z, z, z, rules), std::nullopt, "smoothness at 2");
  expect(check_termination(false, z, v(1, 1, 0.1), z, z, z, rules), TerminationReason::kSmoothness, "smoothness 2.01");
  expect(check_termination(false, v(12, 6, 0), z, z, z, z, rules), std::nullopt, "torque at 180");
  expect(check_termination(false, v(10, 9, 0), z, z, z, z, rules), TerminationReason::kTorque, "torque 181");
  expect(check_termination(false, z, z, z, v(2, 1, 0), z, rules), std::nullopt, "joint at 5");
  expect(check_termination(false, z, z, z, v(2, 1, 0.5), z, rules), TerminationReason::kJointPosition, "joint 5.25");
  expect(check_termination(true, z, z, z, z, z, rules), TerminationReason::kBodyCollision, "collision");

  const RobotModel model = build_variant(TailVariant::kNone);
  SimState s = nominal_state(model);
  ++checked;
  o.require(!body_ground_contact(model.tree, s, forward_kinematics(model.tree, s)), "feet on ground are not a collision");
  s.base_position.z() = 0.03;
  ++checked;
  o.require(body_ground_contact(model.tree, s, forward_kinematics(model.tree, s)), "base on ground is a collision");
  o.detail << "cases=" << checked << " ";
}

// Deterministic return of the toy task over fixed commands.
double toy_return(const ActorCritic& policy) {
  ToyVelocityEnv env(32);
  MatX obs = env.reset(4242);
  double total = 0.0;
  for (int t = 0; t < 20; ++t) {
    const VecStepResult r = env.step(policy.action_mean(obs));
    total += r.rewards.sum();
    obs = r.observations;
  }
  return total / 32.0;
}

void ppo_correctness(Outcome& o) {
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) worst = std::max(worst, oracle::surrogate_gradient_check(seed).relative_error);
  o.detail << "fd_rel=" << worst << " ";
  o.require(worst < kGradientTolerance, "finite differences");

  int improved = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ToyVelocityEnv env(16);
    PolicyConfig pc;
    pc.actor_hidden = pc.critic_hidden = {32, 32};
    PpoConfig ppo;
    ppo.num_envs = 16;
    ppo.horizon = 32;
    PpoLearner learner(env, ActorCritic(2, 1, pc, seed), ppo, seed);
    const double before = toy_return(learner.policy());
    double best = before;
    for (int i = 0; i < kToyIterations; ++i) {
      learner.iterate();
      if ((i + 1) % 20 == 0) best = std::max(best, toy_return(learner.policy()));
    }
    o.detail << "seed" << seed << ":" << before << "->" << best << " ";
    if (best >= kToyImprovement * before) ++improved;
  }
  o.require(improved == 3, "toy improvement in 3 of 3 seeds");
}

ExperimentConfig desk_preset() {
  return load_experiment(fs::path(QUADTAIL_SOURCE_DIR) / "configs" / "desk_reorient.yaml");
}

void reorientation_ordering(Outcome& o) {
  ExperimentConfig base = desk_preset();
  const bool preset_ok = base.env.task == Task::kReorientation && base.env.aerial_only &&
                         base.ppo.num_envs == 64 && base.iteration_budget() <= kOrderingMaxIterations;
  o.require(preset_ok, "desk preset");
  o.detail << "iterations=" << base.iteration_budget() << " ";
  const std::vector<TailVariant> variants{TailVariant::kViperX300S, TailVariant::kWidowX250S, TailVariant::kNone};
  int holding = 0;
  for (std::uint64_t seed : base.seeds) {
    double rotation[3] = {0, 0, 0};
    for (int v = 0; v < 3; ++v) {
      ExperimentConfig c = base;
      c.variant = variants[static_cast<std::size_t>(v)];
      c.checkpoint_interval = c.iteration_budget();
      const fs::path dir = scratch(std::string("ordering_") + to_string(c.variant) + "_" + std::to_string(seed));
      const TrainResult r = train_seed(c, seed, dir);
      ProtocolOptions opt;
      opt.random_drops = kOrderingDrops;
      const ProtocolSummary s = run_protocol(load_checkpoint(r.final_checkpoint), Protocol::kRandomDrops, {}, opt);
      rotation[v] = s.aggregates.at("mean_achieved_rotation_deg");
    }
    const bool ok = rotation[0] > rotation[1] && rotation[1] > rotation[2] && rotation[2] < kNoTailCeilingDeg;
    if (ok) ++holding;
    o.detail << "seed" << seed << ": viper=" << std::setprecision(4) << rotation[0] << " widow=" << rotation[1]
             << " none=" << rotation[2] << (ok ? " ok " : " no ");
  }
  o.require(holding >= kOrderingSeedsRequired, "ordering in 2 of 3 seeds");
  o.require(base.seeds.size() == 3, "three seeds");
}

void determinism(Outcome& o) {
  ExperimentConfig c = desk_preset();
  c.variant = TailVariant::kWidowX250S;
  c.iterations = 20;
  c.checkpoint_interval = 10;
  const fs::path a = scratch("determinism_a"), b = scratch("determinism_b");
  const TrainResult ra = train_seed(c, 7, a);
  train_seed(c, 7, b);
  const std::string csv_a = read_file(a / "iterations.csv");
  o.require(!csv_a.empty() && csv_a == read_file(b / "iterations.csv"), "identical iteration CSVs");

  const Checkpoint ck = load_checkpoint(ra.final_checkpoint);
  save_checkpoint(a / "copy.ckpt", ck);
  const Checkpoint back = load_checkpoint(a / "copy.ckpt");
  ProtocolOptions opt;
  opt.random_drops = 10;
  const ProtocolSummary s1 = run_protocol(ck, Protocol::kRandomDrops, {}, opt);
  const ProtocolSummary s2 = run_protocol(back, Protocol::kRandomDrops, {}, opt);
  o.require(s1.rows == s2.rows && s1.aggregates == s2.aggregates, "checkpoint round trip evaluation");
  o.require(read_file(a / "copy.ckpt") == read_file(ra.final_checkpoint), "checkpoint bytes");
  o.detail << "csv_bytes=" << csv_a.size() << " mean_rotation=" << s1.aggregates.at("mean_achieved_rotation_deg") << " ";
}

struct Criterion {
  std::string name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"reward-golden", reward_golden},
      {"curriculum-exactness", curriculum_exact},
      {"dynamics-conservation", dynamics_conservation},
      {"termination-truth-table", termination_table},
      {"ppo-correctness", ppo_correctness},
      {"reorientation-ordering", reorientation_ordering},
      {"determinism-persistence", determinism},
  };
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = "," + std::string(argv[++i]) + ",";
    } else if (arg == "--list") {
      for (const Criterion& c : all) std::cout << c.name << "\n";
      return 0;
    } else {
      std::cerr << "usage: quadtail_acceptance [--only name[,name]] [--list]\n";
      return 2;
    }
  }
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && only.find("," + c.name + ",") == std::string::npos) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(1) << secs
              << " s) " << std::defaultfloat << std::setprecision(6) << o.detail.str() << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
