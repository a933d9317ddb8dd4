#include "gean/evalharness.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "gean/plant.hpp"

using namespace gean;

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

Dataset tiny_dataset(const ArmModel& arm, int n_traj, std::uint64_t seed) {
  DataParams p = DataParams::defaults(arm.n_joints);
  p.n_traj = n_traj;
  p.traj_duration = 0.4;
  p.knot_interval = 0.1;
  p.settle_steps = 50;
  p.seed = seed;
  return collect_dataset(PlantModel::default_messy(arm.n_joints), arm, p);
}

// A hand-built model whose de-standardized output is a fixed torque, used
// to exercise the model provider without training.
GeanModel constant_model(const ArmModel& arm, const Dataset& ds, double tau) {
  GeanModel m;
  m.n_joints = arm.n_joints;
  m.dt = arm.dt;
  m.history_length = ds.stats.history_length;
  m.history_stride = ds.stats.history_stride;
  std::mt19937_64 rng(1);
  m.net = Mlp::init({m.input_dim(), 4, m.n_joints}, rng);
  m.net.weights.back().setZero();
  m.net.biases.back().setZero();
  m.feature_mean = ds.stats.feature_mean;
  m.feature_std = ds.stats.feature_std;
  // With a zeroed output layer the network emits 0, so the provider's
  // de-standardization yields exactly torque_mean.
  m.torque_mean = Vec::Constant(m.n_joints, tau);
  m.torque_std = Vec::Ones(m.n_joints);
  return m;
}

}  // namespace

TEST_CASE("label playback tracks the log to numerical precision") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 4, 3);
  ReplayConfig cfg;
  cfg.horizons = {1, 50};
  cfg.start_stride = 7;
  cfg.bootstrap_resamples = 200;
  const ReplayReport rep =
      replay_error(arm, ds, TorqueProvider::kLabels, nullptr, nullptr, cfg);
  // Inverse-dynamics labels reproduce the logged motion exactly, so even
  // 50-step playback stays at floating-point noise.
  CHECK(rep.at_horizon(1).mean_deg < 1e-7);
  CHECK(rep.at_horizon(50).mean_deg < 1e-7);
  // The zero baseline, computed alongside, is macroscopic by comparison.
  CHECK(rep.at_horizon(50).zero_baseline_deg > 1e-2);
}

TEST_CASE("[DERIVED] zero-torque replay at one step equals the c_1 table") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 5, 11);
  ReplayConfig cfg;
  cfg.horizons = {1};
  cfg.start_stride = 1;
  cfg.bootstrap_resamples = 0;
  const ReplayReport rep =
      replay_error(arm, ds, TorqueProvider::kZero, nullptr, nullptr, cfg);
  // With stride 1, no model warmup, and equal-length trajectories, the
  // replay start set matches the normalizer windows exactly, so the
  // replay mean equals the joint-mean of the R=1 zero-torque normalizer.
  const Mat c = zero_torque_normalizers(arm, ds, 1);
  CHECK(rep.at_horizon(1).mean_deg ==
        doctest::Approx(c.row(0).mean() * kRadToDeg).epsilon(1e-9));
  CHECK(rep.at_horizon(1).zero_baseline_deg ==
        doctest::Approx(rep.at_horizon(1).mean_deg).epsilon(1e-12));
}

TEST_CASE("reports carry per-trajectory data and ordered intervals") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 6, 17);
  ReplayConfig cfg;
  cfg.horizons = {1, 20};
  cfg.start_stride = 10;
  cfg.bootstrap_resamples = 2000;
  cfg.seed = 4;
  const ReplayReport rep =
      replay_error(arm, ds, TorqueProvider::kZero, nullptr, nullptr, cfg);
  for (const auto& h : rep.horizons) {
    CHECK(h.n_traj == 6);
    CHECK(h.per_traj_deg.size() == 6);
    CHECK(h.ci_lo_deg <= h.mean_deg);
    CHECK(h.mean_deg <= h.ci_hi_deg);
    double acc = 0.0;
    for (double e : h.per_traj_deg) acc += e;
    CHECK(h.mean_deg == doctest::Approx(acc / 6).epsilon(1e-12));
  }
  // Bootstrap is seeded: same config reproduces the interval bit-for-bit.
  const ReplayReport rep2 =
      replay_error(arm, ds, TorqueProvider::kZero, nullptr, nullptr, cfg);
  CHECK(rep.at_horizon(20).ci_lo_deg == rep2.at_horizon(20).ci_lo_deg);
  CHECK(rep.at_horizon(20).ci_hi_deg == rep2.at_horizon(20).ci_hi_deg);
  CHECK_THROWS_AS(rep.at_horizon(99), std::invalid_argument);
}

TEST_CASE("the model provider feeds de-standardized torques to the arm") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 3, 23);
  ReplayConfig cfg;
  cfg.horizons = {1};
  cfg.start_stride = 5;
  cfg.bootstrap_resamples = 0;
  // tau = 0 through the network must match the zero provider exactly.
  const GeanModel zero_model = constant_model(arm, ds, 0.0);
  const ReplayReport via_model =
      replay_error(arm, ds, TorqueProvider::kModel, &zero_model, nullptr, cfg);
  ReplayConfig warm = cfg;
  const ReplayReport via_zero =
      replay_error(arm, ds, TorqueProvider::kZero, &zero_model, nullptr, warm);
  CHECK(via_model.at_horizon(1).mean_deg ==
        doctest::Approx(via_zero.at_horizon(1).mean_deg).epsilon(1e-12));
  // A nonzero constant torque must change the rollouts.
  const GeanModel biased = constant_model(arm, ds, 0.5);
  const ReplayReport via_biased =
      replay_error(arm, ds, TorqueProvider::kModel, &biased, nullptr, cfg);
  CHECK(via_biased.at_horizon(1).mean_deg !=
        doctest::Approx(via_model.at_horizon(1).mean_deg).epsilon(1e-6));
}

TEST_CASE("a blown-up policy saturates at 180 degrees instead of crashing") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 2, 29);
  const GeanModel wild = constant_model(arm, ds, 1e200);
  ReplayConfig cfg;
  cfg.horizons = {1, 30};
  cfg.start_stride = 20;
  cfg.bootstrap_resamples = 0;
  const ReplayReport rep =
      replay_error(arm, ds, TorqueProvider::kModel, &wild, nullptr, cfg);
  CHECK(rep.at_horizon(30).mean_deg == doctest::Approx(180.0).epsilon(1e-9));
  CHECK(std::isfinite(rep.at_horizon(1).mean_deg));
}

TEST_CASE("disagreement is zero for one member and positive for two") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 2, 31);
  Ensemble one;
  one.members.push_back(constant_model(arm, ds, 0.0));
  CHECK(mean_disagreement(one, ds) == 0.0);

  Ensemble two = one;
  GeanModel other = constant_model(arm, ds, 0.0);
  std::mt19937_64 rng(99);
  other.net = Mlp::init({other.input_dim(), 4, 2}, rng);
  two.members.push_back(other);
  CHECK(mean_disagreement(two, ds) > 0.0);
  CHECK_THROWS_AS(mean_disagreement(Ensemble{}, ds), std::invalid_argument);
}

TEST_CASE("replay CSV lists model rows and baseline rows per horizon") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 3, 37);
  ReplayConfig cfg;
  cfg.horizons = {1, 10};
  cfg.start_stride = 15;
  cfg.bootstrap_resamples = 100;
  const ReplayReport rep =
      replay_error(arm, ds, TorqueProvider::kZero, nullptr, nullptr, cfg);
  const std::string path = "/tmp/gean_test_replay.csv";
  write_replay_csv(rep, "zero", path);

  std::ifstream f(path);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "metric,provider,horizon_steps,mean_deg,ci_lo,ci_hi,n_traj");
  int mae_rows = 0, base_rows = 0;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::string metric;
    std::getline(ls, metric, ',');
    if (metric == "replay_mae") ++mae_rows;
    if (metric == "zero_baseline") ++base_rows;
  }
  CHECK(mae_rows == 2);
  CHECK(base_rows == 2);
  std::remove(path.c_str());
}

TEST_CASE("ablation CSV appends the swept columns and disagreement") {
  const ArmModel arm = ArmModel::default_arm(2);
  const Dataset ds = tiny_dataset(arm, 3, 41);
  ReplayConfig cfg;
  cfg.horizons = {1};
  cfg.start_stride = 20;
  cfg.bootstrap_resamples = 0;
  AblationRow row;
  row.provider = "position";
  row.report = replay_error(arm, ds, TorqueProvider::kZero, nullptr, nullptr, cfg);
  row.swept = {{"history_length", 3.0}, {"seed", 1.0}};
  row.disagreement = 0.25;
  const std::string path = "/tmp/gean_test_ablation.csv";
  write_ablation_csv({row}, path);

  std::ifstream f(path);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line ==
        "metric,provider,horizon_steps,mean_deg,ci_lo,ci_hi,n_traj,"
        "history_length,seed,disagreement");
  REQUIRE(std::getline(f, line));
  CHECK(line.find("replay_mae,position,1,") == 0);
  CHECK(line.find(",3,1,0.25") != std::string::npos);
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_ablation_csv({}, path), std::invalid_argument);
}
