#include "gean/reacher_env.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gean;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Minimal ensemble of hand-built models; zeroed output layers make the
// de-standardized torque equal torque_mean exactly.
GeanModel constant_model(const ArmModel& arm, double tau, std::uint64_t seed) {
  GeanModel m;
  m.n_joints = arm.n_joints;
  m.dt = arm.dt;
  m.history_length = 2;
  m.history_stride = 1;
  std::mt19937_64 rng(seed);
  m.net = Mlp::init({m.input_dim(), 4, m.n_joints}, rng);
  m.net.weights.back().setZero();
  m.net.biases.back().setZero();
  m.feature_mean = Vec::Zero(m.input_dim());
  m.feature_std = Vec::Ones(m.input_dim());
  m.torque_mean = Vec::Constant(m.n_joints, tau);
  m.torque_std = Vec::Ones(m.n_joints);
  return m;
}

ReacherEnv make_env(int n, const EnvConfig& cfg) {
  const ArmModel arm = ArmModel::default_arm(n);
  Ensemble ens;
  ens.members.push_back(constant_model(arm, 0.0, 7));
  return ReacherEnv(arm, std::move(ens), cfg);
}

EnvConfig quick_config(int n) {
  EnvConfig cfg = EnvConfig::defaults(n);
  cfg.settle_steps = 20;
  return cfg;
}

}  // namespace

TEST_CASE("reset is seeded and samples goals inside the bounds") {
  const int n = 2;
  EnvConfig cfg = quick_config(n);
  ReacherEnv env = make_env(n, cfg);
  const Vec obs = env.reset(5);
  CHECK(obs.size() == 4 * n);
  CHECK(obs.segment(0, n) == env.joint_state().q);
  CHECK(obs.segment(n, n) == env.joint_state().qdot);
  CHECK(obs.segment(2 * n, n) == env.command());
  CHECK(obs.segment(3 * n, n) == env.goal());

  ReacherEnv env2 = make_env(n, cfg);
  CHECK(env2.reset(5) == obs);
  CHECK(env2.goal() == env.goal());
  CHECK(env2.reset(6) != obs);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    env.reset(seed);
    for (int j = 0; j < n; ++j) {
      CHECK(env.goal()[j] >= cfg.goal_bounds[j].lo);
      CHECK(env.goal()[j] <= cfg.goal_bounds[j].hi);
      CHECK(env.command()[j] >= -1.0);
      CHECK(env.command()[j] <= 1.0);
    }
  }
}

TEST_CASE("commands are rate-limited and saturate at the valve range") {
  const int n = 2;
  EnvConfig cfg = quick_config(n);
  // Start pinned at full pressure so the clamp is observable.
  cfg.u_init_bounds.assign(n, {1.0, 1.0});
  ReacherEnv env = make_env(n, cfg);
  env.reset(1);
  Vec u_prev = env.command();
  CHECK(u_prev == Vec::Ones(n));

  Vec huge(n), zero(n);
  huge << 1e6, -1e6;
  zero.setZero();
  env.step(huge);
  // tanh saturates to +-1, so the change is exactly +-delta_u_max, except
  // where the valve range clamps it.
  CHECK(env.command()[0] == 1.0);
  CHECK(env.command()[1] == doctest::Approx(1.0 - cfg.delta_u_max).epsilon(1e-12));
  u_prev = env.command();
  env.step(zero);
  CHECK(env.command() == u_prev);  // tanh(0) = 0: no command change

  std::mt19937_64 rng(3);
  std::normal_distribution<double> draw(0.0, 2.0);
  for (int k = 0; k < 40; ++k) {
    Vec a(n);
    for (int j = 0; j < n; ++j) a[j] = draw(rng);
    u_prev = env.command();
    env.step(a);
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(env.command()[j] - u_prev[j]) <= cfg.delta_u_max + 1e-15);
      CHECK(std::abs(env.command()[j]) <= 1.0);
    }
  }
}

TEST_CASE("episodes last exactly 200 agent steps and then refuse to run") {
  const int n = 2;
  ReacherEnv env = make_env(n, quick_config(n));
  CHECK_THROWS_AS(env.step(Vec::Zero(n)), std::logic_error);  // before reset
  env.reset(11);
  const Vec zero = Vec::Zero(n);
  int transitions = 0;
  bool done = false;
  while (!done) {
    const StepResult r = env.step(zero);
    ++transitions;
    done = r.done;
    REQUIRE(transitions <= 200);
  }
  CHECK(transitions == 200);
  CHECK(env.done());
  CHECK(env.steps_done() == 200);
  CHECK_THROWS_AS(env.step(zero), std::logic_error);
  // The simulator clock advanced action_repeat sub-steps per agent step.
  CHECK(env.sim_time() ==
        doctest::Approx(200 * 5 * env.arm().dt).epsilon(1e-12));
  // reset() rearms the episode.
  env.reset(12);
  CHECK(env.steps_done() == 0);
  CHECK_NOTHROW(env.step(zero));
}

TEST_CASE("[DERIVED] the reward is the documented weighted sum") {
  const int n = 2;
  EnvConfig cfg = quick_config(n);
  ReacherEnv env = make_env(n, cfg);
  env.reset(21);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> draw(0.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    Vec a(n);
    for (int j = 0; j < n; ++j) a[j] = draw(rng);
    const Vec u_before = env.command();
    const StepResult r = env.step(a);
    const RewardTerms& t = r.terms;
    CHECK(std::abs(r.reward - (t.dist + cfg.c_act * t.act +
                               cfg.c_disag * t.disag + cfg.c_lim * t.lim)) <
          1e-12);
    // Components recomputed from the public state.
    CHECK(t.dist ==
          doctest::Approx(-(env.joint_state().q - env.goal()).norm())
              .epsilon(1e-12));
    CHECK(t.act ==
          doctest::Approx(-(env.command() - u_before).squaredNorm())
              .epsilon(1e-12));
    CHECK(t.disag == doctest::Approx(-r.disagreement.sum()).epsilon(1e-12));
    CHECK(t.lim <= 0.0);
  }
}

TEST_CASE("[DERIVED] reward components match hand-computed anchors") {
  const ArmModel arm = ArmModel::default_arm(4);
  const EnvConfig cfg = EnvConfig::defaults(4);
  const Vec zero4 = Vec::Zero(4);

  // Distance: a single joint 0.1 rad off costs exactly -0.1.
  Vec q = zero4, goal = zero4;
  q[0] = 0.1;
  RewardTerms t = reward_terms(q, goal, zero4, zero4, arm.joint_limits, cfg);
  CHECK(t.total == doctest::Approx(-0.1).epsilon(1e-12));

  // Action: |delta_u| = 0.01 on all four joints costs 1250 * 4e-4 = 0.5.
  t = reward_terms(zero4, zero4, Vec::Constant(4, 0.01), zero4,
                   arm.joint_limits, cfg);
  CHECK(t.act == doctest::Approx(-4e-4).epsilon(1e-12));
  CHECK(t.total == doctest::Approx(-0.5).epsilon(1e-12));

  // Disagreement: sigma summing to 2 costs 0.025 * 2 = 0.05.
  Vec sigma = Vec::Constant(4, 0.5);
  t = reward_terms(zero4, zero4, zero4, sigma, arm.joint_limits, cfg);
  CHECK(t.total == doctest::Approx(-0.05).epsilon(1e-12));

  // Joint limit: sitting exactly on a limit costs one full margin unit;
  // at the margin boundary the hinge is zero.
  q = zero4;
  q[1] = arm.joint_limits[1].hi;
  t = reward_terms(q, q, zero4, zero4, arm.joint_limits, cfg);
  CHECK(t.lim == doctest::Approx(-1.0).epsilon(1e-12));
  q[1] = arm.joint_limits[1].hi - cfg.limit_margin;
  t = reward_terms(q, q, zero4, zero4, arm.joint_limits, cfg);
  CHECK(t.lim == 0.0);
}

TEST_CASE("success demands a strict 2-degree mean final error") {
  const Vec goal = Vec::Zero(4);
  CHECK(success(goal, goal));  // exact hit
  CHECK(success(Vec::Constant(4, 1.0 * kDeg), goal));
  CHECK_FALSE(success(Vec::Constant(4, 2.0 * kDeg), goal));  // strict
  CHECK(success(Vec::Constant(4, 1.999 * kDeg), goal));
  // The criterion averages over joints: one joint 8 degrees off fails
  // even when the rest are perfect, 7.9 degrees squeaks by.
  Vec q = Vec::Zero(4);
  q[2] = 8.0 * kDeg;
  CHECK_FALSE(success(q, goal));
  q[2] = 7.9 * kDeg;
  CHECK(success(q, goal));
}

TEST_CASE("identical seeds and actions reproduce an episode bit-for-bit") {
  const int n = 2;
  EnvConfig cfg = quick_config(n);
  const ArmModel arm = ArmModel::default_arm(n);
  Ensemble ens;
  ens.members.push_back(constant_model(arm, 0.0, 7));
  ens.members.push_back(constant_model(arm, 0.1, 8));
  ReacherEnv a(arm, ens, cfg), b(arm, ens, cfg);
  a.reset(33);
  b.reset(33);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> draw(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    Vec act(n);
    for (int j = 0; j < n; ++j) act[j] = draw(rng);
    const StepResult ra = a.step(act);
    const StepResult rb = b.step(act);
    CHECK(ra.observation == rb.observation);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.disagreement == rb.disagreement);
  }
}

TEST_CASE("shooting returns the first action of the best sampled plan") {
  const int n = 2;
  ReacherEnv env = make_env(n, quick_config(n));
  env.reset(41);

  // One candidate: the controller must return that plan's first action,
  // which we reproduce from the same seeded generator.
  const Vec got = shooting_controller(env, 3, 1, 77);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> draw(0.0, 1.0);
  Vec expect(n);
  for (int j = 0; j < n; ++j) expect[j] = draw(rng);
  CHECK(got == expect);

  // Deterministic in (env, seed); planning leaves the real env untouched.
  const int steps_before = env.steps_done();
  const Vec a1 = shooting_controller(env, 4, 8, 5);
  const Vec a2 = shooting_controller(env, 4, 8, 5);
  CHECK(a1 == a2);
  CHECK(env.steps_done() == steps_before);
  CHECK_THROWS_AS(shooting_controller(env, 0, 8, 5), std::invalid_argument);
  CHECK_THROWS_AS(shooting_controller(env, 4, 0, 5), std::invalid_argument);
}
