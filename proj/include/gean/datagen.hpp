// Exploration-data collection and label computation: cubic-spline
// control sampling, plant rollouts, finite-difference labels,
// inverse-dynamics torque labels, trajectory-level splitting, and
// dataset persistence.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gean/dynamics.hpp"
#include "gean/plant.hpp"
#include "gean/trajectory.hpp"

namespace gean {

struct Bounds {
  double lo;
  double hi;
};

// Normalization statistics, always computed from the training split.
struct DatasetStats {
  int history_length = 0;  // H the feature stats were computed for
  int history_stride = 0;  // s the feature stats were computed for
  Vec feature_mean;        // per delta-history feature
  Vec feature_std;
  Vec torque_mean;  // per joint
  Vec torque_std;

  bool has_feature_stats() const { return feature_mean.size() > 0; }
  bool has_torque_stats() const { return torque_mean.size() > 0; }
};

struct Dataset {
  int n_joints = 0;
  double dt = 0.002;
  std::vector<JointLimit> joint_limits;
  std::vector<Trajectory> trajectories;
  DatasetStats stats;

  std::size_t total_samples() const;
};

struct DataParams {
  int n_traj = 300;
  double traj_duration = 2.0;     // [s]
  double knot_interval = 0.5;     // [s]
  std::vector<Bounds> control_bounds;  // per joint; defaults to [-0.8, 0.8]
  std::vector<Bounds> u_init_bounds;   // reset-protocol initial commands
  Vec intermediate_pose;               // reset-protocol pose [rad]
  int settle_steps = 500;
  double position_noise_std = 0.0;  // optional Gaussian noise on logged q
  std::uint64_t seed = 0;

  static DataParams defaults(int n_joints);
};

// Knots drawn uniformly in bounds at 0, knot_interval, ..., duration;
// natural cubic spline through the knots evaluated at dt, clamped to
// bounds after interpolation.
std::vector<Vec> sample_exploration_controls(std::uint64_t seed,
                                             double duration,
                                             double knot_interval,
                                             const std::vector<Bounds>& bounds,
                                             double dt);

// Natural cubic spline through (knot_times, values), evaluated at query
// times. Exposed for tests.
std::vector<double> natural_cubic_spline(const std::vector<double>& knot_times,
                                         const std::vector<double>& values,
                                         const std::vector<double>& queries);

// n_traj independent seeded rollouts, each starting from the settle-phase
// reset protocol (intermediate pose, random held u_init). Computes torque
// and feature statistics for the default history configuration.
Dataset collect_dataset(const PlantModel& plant, const ArmModel& arm,
                        const DataParams& params);

struct FiniteDiffLabels {
  // Entries for interior steps t in {1, ..., T-1}; index i corresponds
  // to step t = i + 1.
  std::vector<Vec> qdot;   // backward difference
  std::vector<Vec> qddot;  // central difference
};

FiniteDiffLabels finite_diff_labels(const Trajectory& traj);

// tau_t = invdyn(q_t, qdot_t, qddot_t) for interior steps; index i
// corresponds to step t = i + 1.
std::vector<Vec> torque_labels(const ArmModel& arm, const Trajectory& traj);

// Trajectory-granularity split; stats recomputed on the train split and
// copied to val. The arm is needed to recompute torque statistics.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds,
                                          double train_fraction,
                                          std::uint64_t seed,
                                          const ArmModel& arm);

// Recomputes the stats block (features for the given H, s plus torque
// standardizer) from all trajectories of ds.
DatasetStats compute_stats(const Dataset& ds, const ArmModel& arm,
                           int history_length, int history_stride);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace gean
