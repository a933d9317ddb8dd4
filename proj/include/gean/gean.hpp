// The Generalized Actuator Network: normalized delta-history features, a
// small feed-forward torque predictor, the torque / one-step position /
// multi-step position losses with exact gradients through the simulator
// step, Adam training with trajectory-level validation early stopping,
// and ensembles.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gean/datagen.hpp"
#include "gean/dynamics.hpp"
#include "gean/network.hpp"

namespace gean {

enum class LossKind { kTorque, kPosition, kMultiStep };

std::string loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

struct GeanConfig {
  int history_length = 3;
  int history_stride = 1;
  int hidden_layers = 2;
  int hidden_width = 512;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 150;
  int batch_size = 256;
  LossKind loss_kind = LossKind::kTorque;
  int rollout_length = 1;        // R for the multi-step loss
  bool unit_normalizers = false; // use an all-ones c-table for multi-step
  int ensemble_size = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeanModel {
  int n_joints = 0;
  double dt = 0.002;
  int history_length = 3;
  int history_stride = 1;
  Mlp net;
  Vec feature_mean, feature_std;  // input normalizer
  Vec torque_mean, torque_std;    // torque standardizer

  int input_dim() const { return 2 * n_joints * (history_length + 1); }
  int window_size() const { return history_length * history_stride + 1; }
};

struct Ensemble {
  std::vector<GeanModel> members;

  int size() const { return static_cast<int>(members.size()); }
};

// Normalized feature vector from explicit history windows (length
// H*s + 1, oldest first).
Vec build_features(const GeanModel& model, const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window);

// De-standardized torque prediction for one history window.
Vec predict_torque(const GeanModel& model, const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window);
Vec predict_torque_features(const GeanModel& model, const Vec& features);

// Per-joint population standard deviation across member predictions.
Vec disagreement(const Ensemble& ensemble, const std::vector<Vec>& q_window,
                 const std::vector<Vec>& u_window);

// Raw (unnormalized) delta features at rollout offset r past trajectory
// step t. Positions at offsets 1..r come from the predicted history qhat
// (indexed by offset; qhat[0] is unused), positions at offsets <= 0 and
// all controls come from the log. out must have size model.input_dim().
void rollout_features(const GeanModel& model, const Trajectory& traj, int t,
                      int r, const std::vector<Vec>& qhat, Vec& out);

// A training sample is step t of a dataset trajectory.
struct SampleRef {
  int traj;
  int t;
};

struct LossGradResult {
  double loss = 0.0;
  MlpGrad grad;
  int skipped = 0;  // samples dropped for insufficient trajectory length
};

// Eq. 1: mean squared error between standardized prediction and
// standardized inverse-dynamics torque label.
LossGradResult torque_loss_grad(const GeanModel& model, const ArmModel& arm,
                                const Dataset& data,
                                const std::vector<SampleRef>& batch,
                                bool want_grad = true);

// Eq. 3: mean squared next-position error, gradient through the one-step
// simulator Jacobian dt^2 M(q_t)^-1.
LossGradResult position_loss_grad(const GeanModel& model, const ArmModel& arm,
                                  const Dataset& data,
                                  const std::vector<SampleRef>& batch,
                                  bool want_grad = true);

// Multi-step position loss with per-step errors normalized elementwise by
// the zero-torque baseline table c (R x n). Gradients backpropagate
// through all R chained simulator steps, including predicted positions
// fed back into later history windows.
LossGradResult multi_step_loss_grad(const GeanModel& model,
                                    const ArmModel& arm, const Dataset& data,
                                    const std::vector<SampleRef>& batch,
                                    int rollout_length, const Mat& c_table,
                                    bool want_grad = true);

// Zero-torque baseline error table: c[r-1][j] is the absolute position
// error of the constant-zero-torque rollout after r steps, averaged over
// all possible starts in the dataset.
Mat zero_torque_normalizers(const ArmModel& arm, const Dataset& data,
                            int rollout_length);

struct TrainCurveRow {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainResult {
  GeanModel model;  // epoch-best snapshot by validation loss
  std::vector<TrainCurveRow> curve;
  int best_epoch = 0;
};

TrainResult train(const GeanConfig& config, const ArmModel& arm,
                  const Dataset& train_set, const Dataset& val_set);

struct EnsembleTrainResult {
  Ensemble ensemble;
  std::vector<std::vector<TrainCurveRow>> curves;
};

// Member i trains with seed config.seed + i and its own data permutation.
EnsembleTrainResult train_ensemble(const GeanConfig& config,
                                   const ArmModel& arm,
                                   const Dataset& train_set,
                                   const Dataset& val_set);

void save_model(const GeanModel& model, const std::string& path);
GeanModel load_model(const std::string& path);
void save_ensemble(const Ensemble& ensemble, const std::string& path);
Ensemble load_ensemble(const std::string& path);
void write_model(const GeanModel& model, std::ostream& os);

void write_train_curve(const std::vector<TrainCurveRow>& curve,
                       const std::string& path);

}  // namespace gean
