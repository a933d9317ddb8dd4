// Replay-error evaluation of the learned-torque simulation against
// held-out plant trajectories, plus the standard ablation sweeps
// (training loss, dataset size, history configuration, rollout length).
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gean/gean.hpp"

namespace gean {

// Source of the torque applied during a replay.
enum class TorqueProvider { kZero, kLabels, kModel, kEnsemble };

std::string torque_provider_name(TorqueProvider p);

struct ReplayConfig {
  std::vector<int> horizons{1, 500};  // steps
  int start_stride = 1;               // subsample replay start points
  int bootstrap_resamples = 10000;
  std::uint64_t seed = 0;  // ensemble member sampling + bootstrap
};

struct HorizonReport {
  int horizon_steps = 0;
  double mean_deg = 0.0;  // MAE over joints, starts, trajectories
  double ci_lo_deg = 0.0;
  double ci_hi_deg = 0.0;
  double zero_baseline_deg = 0.0;  // zero-torque provider, same horizon
  std::vector<double> per_traj_deg;
  int n_traj = 0;
};

struct ReplayReport {
  std::vector<HorizonReport> horizons;

  const HorizonReport& at_horizon(int steps) const;
};

// Replays every held-out trajectory: the simulator starts from the
// logged (q, backward-difference qdot) at each eligible start point and
// applies the logged commands, with the torque coming from the chosen
// provider. Position histories feeding the network are logged before the
// start and simulated after it; command histories are always logged.
// model is required for kModel, ensemble for kEnsemble; either may also
// be passed for kZero/kLabels so all providers share the same history
// warmup and hence the same start points.
ReplayReport replay_error(const ArmModel& arm, const Dataset& test_set,
                          TorqueProvider provider, const GeanModel* model,
                          const Ensemble* ensemble, const ReplayConfig& cfg);

// Mean over sampled history windows (every sample_stride-th eligible
// step) and joints of the per-joint ensemble disagreement.
double mean_disagreement(const Ensemble& ensemble, const Dataset& data,
                         int sample_stride = 10);

// One trained-and-evaluated configuration of an ablation sweep.
struct AblationRow {
  std::vector<std::pair<std::string, double>> swept;  // column -> value
  std::string provider;                               // e.g. loss kind
  ReplayReport report;
  double disagreement = 0.0;  // populated by sweeps that train ensembles
};

// Trains one model per (loss kind, seed) and replays it on the test set.
std::vector<AblationRow> ablate_loss(const ArmModel& arm,
                                     const Dataset& train_set,
                                     const Dataset& val_set,
                                     const Dataset& test_set,
                                     const std::vector<LossKind>& losses,
                                     const std::vector<std::uint64_t>& seeds,
                                     const GeanConfig& base,
                                     const ReplayConfig& replay);

// Trains on truncated datasets (first `size` trajectories). The models
// trained for one size double as an ensemble for the disagreement metric.
std::vector<AblationRow> ablate_dataset_size(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& sizes,
    const std::vector<std::uint64_t>& seeds, const GeanConfig& base,
    const ReplayConfig& replay);

// Cartesian sweep over history lengths and strides.
std::vector<AblationRow> ablate_history(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& lengths,
    const std::vector<int>& strides, const std::vector<std::uint64_t>& seeds,
    const GeanConfig& base, const ReplayConfig& replay);

// Multi-step loss with varying rollout length R.
std::vector<AblationRow> ablate_rollout_length(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& rollout_lengths,
    const std::vector<std::uint64_t>& seeds, const GeanConfig& base,
    const ReplayConfig& replay);

// CSV: metric,provider,horizon_steps,mean_deg,ci_lo,ci_hi,n_traj
void write_replay_csv(const ReplayReport& report, const std::string& provider,
                      const std::string& path);
// Same columns plus the swept parameter columns and seed/disagreement.
void write_ablation_csv(const std::vector<AblationRow>& rows,
                        const std::string& path);

}  // namespace gean
