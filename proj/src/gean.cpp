#include "gean/gean.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gean/feature.hpp"
#include "gean/io_util.hpp"
#include "gean/parallel.hpp"

namespace gean {

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kTorque: return "torque";
    case LossKind::kPosition: return "position";
    case LossKind::kMultiStep: return "multistep";
  }
  return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
  if (name == "torque") return LossKind::kTorque;
  if (name == "position") return LossKind::kPosition;
  if (name == "multistep") return LossKind::kMultiStep;
  throw std::invalid_argument("unknown loss kind: " + name);
}

void GeanConfig::validate() const {
  if (history_length < 1 || history_stride < 1)
    throw std::invalid_argument("history_length and history_stride must be >= 1");
  if (hidden_layers < 1 || hidden_width < 1)
    throw std::invalid_argument("network dimensions must be >= 1");
  if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (rollout_length < 1) throw std::invalid_argument("rollout_length must be >= 1");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble_size must be >= 1");
}

Vec build_features(const GeanModel& model, const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window) {
  const Vec raw = delta_features(q_window, u_window, model.history_length,
                                 model.history_stride);
  return (raw - model.feature_mean).cwiseQuotient(model.feature_std);
}

Vec predict_torque_features(const GeanModel& model, const Vec& features) {
  if (features.size() != model.input_dim())
    throw std::invalid_argument("feature vector has wrong dimension");
  const Mat out = mlp_forward(model.net, features.transpose());
  return out.row(0).transpose().cwiseProduct(model.torque_std) +
         model.torque_mean;
}

Vec predict_torque(const GeanModel& model, const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window) {
  return predict_torque_features(model, build_features(model, q_window, u_window));
}

Vec disagreement(const Ensemble& ensemble, const std::vector<Vec>& q_window,
                 const std::vector<Vec>& u_window) {
  if (ensemble.members.empty()) throw std::invalid_argument("empty ensemble");
  const int n = ensemble.members.front().n_joints;
  Vec sum = Vec::Zero(n), sumsq = Vec::Zero(n);
  for (const auto& m : ensemble.members) {
    const Vec tau = predict_torque(m, q_window, u_window);
    sum += tau;
    sumsq += tau.cwiseProduct(tau);
  }
  const double inv = 1.0 / ensemble.size();
  const Vec mean = sum * inv;
  return (sumsq * inv - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt();
}

void rollout_features(const GeanModel& model, const Trajectory& traj, int t,
                      int r, const std::vector<Vec>& qhat, Vec& out) {
  const int H = model.history_length;
  const int s = model.history_stride;
  const int n = model.n_joints;
  auto q_at = [&](int offset) -> const Vec& {
    return offset > 0 ? qhat[offset] : traj.q[t + offset];
  };
  int idx = 0;
  const Vec& q_now = q_at(r);
  for (int k = 0; k <= H; ++k) {
    const Vec& qk = q_at(r - k * s);
    for (int j = 0; j < n; ++j)
      out[idx++] = k == 0 ? q_now[j] : qk[j] - q_now[j];
  }
  const Vec& u_now = traj.u[t + r];
  for (int k = 0; k <= H; ++k) {
    const Vec& uk = traj.u[t + r - k * s];
    for (int j = 0; j < n; ++j)
      out[idx++] = k == 0 ? u_now[j] : uk[j] - u_now[j];
  }
}

namespace {

// Central-difference Jacobians of the forward dynamics w.r.t. q and qdot.
void dynamics_jacobians(const ArmModel& arm, const Vec& q, const Vec& qdot,
                        const Vec& tau, Mat& d_q, Mat& d_qdot) {
  const int n = arm.n_joints;
  d_q.resize(n, n);
  d_qdot.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const double hq = 1e-6 * std::max(1.0, std::abs(q[j]));
    Vec qp = q, qm = q;
    qp[j] += hq;
    qm[j] -= hq;
    d_q.col(j) = (forward_dynamics(arm, qp, qdot, tau) -
                  forward_dynamics(arm, qm, qdot, tau)) /
                 (2.0 * hq);
    const double hv = 1e-6 * std::max(1.0, std::abs(qdot[j]));
    Vec vp = qdot, vm = qdot;
    vp[j] += hv;
    vm[j] -= hv;
    d_qdot.col(j) = (forward_dynamics(arm, q, vp, tau) -
                     forward_dynamics(arm, q, vm, tau)) /
                    (2.0 * hv);
  }
}

bool sample_usable(const GeanModel& model, const Dataset& data,
                   const SampleRef& ref, int rollout_length) {
  const auto& traj = data.trajectories[ref.traj];
  const int warmup = model.history_length * model.history_stride;
  const int t = ref.t;
  return t >= std::max(1, warmup) &&
         t + rollout_length < static_cast<int>(traj.size());
}

}  // namespace

LossGradResult torque_loss_grad(const GeanModel& model, const ArmModel& arm,
                                const Dataset& data,
                                const std::vector<SampleRef>& batch,
                                bool want_grad) {
  const int n = model.n_joints;
  std::vector<SampleRef> usable;
  usable.reserve(batch.size());
  for (const auto& ref : batch)
    if (sample_usable(model, data, ref, 1)) usable.push_back(ref);

  LossGradResult res;
  res.skipped = static_cast<int>(batch.size() - usable.size());
  if (want_grad) res.grad = MlpGrad::zeros_like(model.net);
  if (usable.empty()) throw std::invalid_argument("empty batch");

  const int b_size = static_cast<int>(usable.size());
  Mat features(b_size, model.input_dim());
  Mat labels(b_size, n);
  for (int b = 0; b < b_size; ++b) {
    const auto& traj = data.trajectories[usable[b].traj];
    const int t = usable[b].t;
    const Vec f = delta_features(traj, t, model.history_length, model.history_stride);
    features.row(b) =
        (f - model.feature_mean).cwiseQuotient(model.feature_std).transpose();
    const Vec qdot = (traj.q[t] - traj.q[t - 1]) / model.dt;
    const Vec qddot =
        (traj.q[t + 1] - 2.0 * traj.q[t] + traj.q[t - 1]) / (model.dt * model.dt);
    const Vec tau = inverse_dynamics(arm, traj.q[t], qdot, qddot);
    labels.row(b) =
        (tau - model.torque_mean).cwiseQuotient(model.torque_std).transpose();
  }
  MlpCache cache;
  const Mat out = mlp_forward(model.net, features, want_grad ? &cache : nullptr);
  const Mat residual = out - labels;
  const double denom = static_cast<double>(b_size) * n;
  res.loss = residual.squaredNorm() / denom;
  if (want_grad) {
    const Mat d_out = (2.0 / denom) * residual;
    mlp_backward(model.net, cache, d_out, res.grad);
  }
  return res;
}

LossGradResult multi_step_loss_grad(const GeanModel& model,
                                    const ArmModel& arm, const Dataset& data,
                                    const std::vector<SampleRef>& batch,
                                    int rollout_length, const Mat& c_table,
                                    bool want_grad) {
  const int n = model.n_joints;
  const int R = rollout_length;
  if (R < 1) throw std::invalid_argument("rollout_length must be >= 1");
  if (c_table.rows() != R || c_table.cols() != n)
    throw std::invalid_argument("c_table must be R x n_joints");

  std::vector<SampleRef> usable;
  usable.reserve(batch.size());
  for (const auto& ref : batch)
    if (sample_usable(model, data, ref, R)) usable.push_back(ref);

  LossGradResult res;
  res.skipped = static_cast<int>(batch.size() - usable.size());
  if (want_grad) res.grad = MlpGrad::zeros_like(model.net);
  if (usable.empty()) throw std::invalid_argument("empty batch");

  const int b_size = static_cast<int>(usable.size());
  const double dt = model.dt;
  const double denom = static_cast<double>(R) * b_size * n;

  // Rollout storage, per sample: positions/velocities at rollout offsets
  // 0..R, predicted torques at 0..R-1.
  std::vector<std::vector<Vec>> qhat(b_size), qdhat(b_size), tauhat(b_size);
  for (int b = 0; b < b_size; ++b) {
    const auto& traj = data.trajectories[usable[b].traj];
    const int t = usable[b].t;
    qhat[b].assign(R + 1, Vec());
    qdhat[b].assign(R + 1, Vec());
    tauhat[b].assign(R, Vec());
    qhat[b][0] = traj.q[t];
    qdhat[b][0] = (traj.q[t] - traj.q[t - 1]) / dt;
  }

  std::vector<MlpCache> caches(want_grad ? R : 1);
  Mat features(b_size, model.input_dim());
  Vec raw(model.input_dim());
  for (int r = 0; r < R; ++r) {
    for (int b = 0; b < b_size; ++b) {
      const auto& traj = data.trajectories[usable[b].traj];
      rollout_features(model, traj, usable[b].t, r, qhat[b], raw);
      features.row(b) =
          (raw - model.feature_mean).cwiseQuotient(model.feature_std).transpose();
    }
    MlpCache* cache = want_grad ? &caches[r] : &caches[0];
    const Mat out = mlp_forward(model.net, features, cache);
    for (int b = 0; b < b_size; ++b) {
      const Vec tau = out.row(b).transpose().cwiseProduct(model.torque_std) +
                      model.torque_mean;
      tauhat[b][r] = tau;
      const Vec qdd = forward_dynamics(arm, qhat[b][r], qdhat[b][r], tau);
      qdhat[b][r + 1] = qdhat[b][r] + dt * qdd;
      qhat[b][r + 1] = qhat[b][r] + dt * qdhat[b][r + 1];
    }
  }

  double loss = 0.0;
  for (int b = 0; b < b_size; ++b) {
    const auto& traj = data.trajectories[usable[b].traj];
    const int t = usable[b].t;
    for (int r = 1; r <= R; ++r) {
      const Vec err =
          (qhat[b][r] - traj.q[t + r]).cwiseQuotient(c_table.row(r - 1).transpose());
      loss += err.squaredNorm();
    }
  }
  res.loss = loss / denom;
  if (!want_grad) return res;

  // Position adjoints a[b][r] = dL/dqhat_r.
  std::vector<std::vector<Vec>> adj(b_size);
  for (int b = 0; b < b_size; ++b) {
    const auto& traj = data.trajectories[usable[b].traj];
    const int t = usable[b].t;
    adj[b].assign(R + 1, Vec::Zero(n));
    for (int r = 1; r <= R; ++r) {
      const Vec c = c_table.row(r - 1).transpose();
      adj[b][r] = (2.0 / denom) *
                  (qhat[b][r] - traj.q[t + r]).cwiseQuotient(c.cwiseProduct(c));
    }
  }

  const int H = model.history_length;
  const int s = model.history_stride;
  Mat d_out(b_size, n), d_features;
  Mat jac_q, jac_qdot;
  for (int r = R - 1; r >= 0; --r) {
    // Torque adjoint through the one-step Jacobian dt^2 M(qhat_r)^-1.
    for (int b = 0; b < b_size; ++b) {
      const Mat m = mass_matrix(arm, qhat[b][r]);
      const Vec taubar = dt * dt * Eigen::LLT<Mat>(m).solve(adj[b][r + 1]);
      d_out.row(b) = taubar.cwiseProduct(model.torque_std).transpose();
    }
    mlp_backward(model.net, caches[r], d_out, res.grad, &d_features);
    for (int b = 0; b < b_size; ++b) {
      // Feature adjoints back onto predicted positions in the window.
      const Vec dv =
          d_features.row(b).transpose().cwiseQuotient(model.feature_std);
      for (int j = 0; j < n; ++j) {
        double onto_current = dv[j];  // k = 0 entry
        for (int k = 1; k <= H; ++k) {
          const double g = dv[k * n + j];
          onto_current -= g;
          const int offset = r - k * s;
          if (offset > 0) adj[b][offset][j] += g;
        }
        if (r > 0) adj[b][r][j] += onto_current;
      }
      // State adjoints through the symplectic Euler step.
      if (r >= 1) {
        dynamics_jacobians(arm, qhat[b][r], qdhat[b][r], tauhat[b][r], jac_q,
                           jac_qdot);
        const Mat j_curr =
            2.0 * Mat::Identity(n, n) + dt * dt * jac_q + dt * jac_qdot;
        adj[b][r] += j_curr.transpose() * adj[b][r + 1];
        if (r - 1 > 0) {
          const Mat j_prev = -(Mat::Identity(n, n) + dt * jac_qdot);
          adj[b][r - 1] += j_prev.transpose() * adj[b][r + 1];
        }
      }
    }
  }
  return res;
}

LossGradResult position_loss_grad(const GeanModel& model, const ArmModel& arm,
                                  const Dataset& data,
                                  const std::vector<SampleRef>& batch,
                                  bool want_grad) {
  // Definitional reduction: the one-step position loss is the multi-step
  // loss at R = 1 with unit normalizers, sharing one code path so the two
  // train bit-identically.
  return multi_step_loss_grad(model, arm, data, batch, 1,
                              Mat::Ones(1, model.n_joints), want_grad);
}

Mat zero_torque_normalizers(const ArmModel& arm, const Dataset& data,
                            int rollout_length) {
  const int R = rollout_length;
  const int n = arm.n_joints;
  if (R < 1) throw std::invalid_argument("rollout_length must be >= 1");
  const Vec zero = Vec::Zero(n);
  const auto n_traj = static_cast<std::int64_t>(data.trajectories.size());

  std::vector<Mat> abs_err(kParallelChunks, Mat::Zero(R, n));
  std::vector<std::int64_t> counts(kParallelChunks, 0);
  for_each_chunk(n_traj, [&](int chunk, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const auto& traj = data.trajectories[i];
      const int size = static_cast<int>(traj.size());
      for (int t = 1; t + R < size; ++t) {
        JointState st{traj.q[t], (traj.q[t] - traj.q[t - 1]) / traj.dt};
        for (int r = 1; r <= R; ++r) {
          st = step(arm, st, zero);
          abs_err[chunk].row(r - 1) += (st.q - traj.q[t + r]).cwiseAbs().transpose();
        }
        ++counts[chunk];
      }
    }
  });
  Mat total = Mat::Zero(R, n);
  std::int64_t count = 0;
  for (int c = 0; c < kParallelChunks; ++c) {
    total += abs_err[c];
    count += counts[c];
  }
  if (count == 0)
    throw std::runtime_error("no rollout windows for zero-torque normalizers");
  total /= static_cast<double>(count);
  if ((total.array() <= 0).any())
    throw std::runtime_error(
        "degenerate dataset: zero-torque baseline error vanishes");
  return total;
}

namespace {

std::vector<SampleRef> eligible_samples(const GeanModel& model,
                                        const Dataset& data, int rollout_length) {
  std::vector<SampleRef> samples;
  const int warmup = model.history_length * model.history_stride;
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const int size = static_cast<int>(data.trajectories[i].size());
    for (int t = std::max(1, warmup); t + rollout_length < size; ++t) {
      samples.push_back({static_cast<int>(i), t});
    }
  }
  return samples;
}

double eval_loss(const GeanModel& model, const ArmModel& arm,
                 const Dataset& data, const std::vector<SampleRef>& samples,
                 const GeanConfig& config, const Mat& c_table) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < samples.size(); i += config.batch_size) {
    const std::size_t end = std::min(samples.size(), i + config.batch_size);
    const std::vector<SampleRef> batch(samples.begin() + i, samples.begin() + end);
    LossGradResult r;
    switch (config.loss_kind) {
      case LossKind::kTorque:
        r = torque_loss_grad(model, arm, data, batch, false);
        break;
      case LossKind::kPosition:
        r = position_loss_grad(model, arm, data, batch, false);
        break;
      case LossKind::kMultiStep:
        r = multi_step_loss_grad(model, arm, data, batch,
                                 config.rollout_length, c_table, false);
        break;
    }
    total += r.loss * static_cast<double>(end - i - r.skipped);
    count += end - i - r.skipped;
  }
  return count > 0 ? total / static_cast<double>(count)
                   : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TrainResult train(const GeanConfig& config, const ArmModel& arm,
                  const Dataset& train_set, const Dataset& val_set) {
  config.validate();
  const int n = train_set.n_joints;
  const int R =
      config.loss_kind == LossKind::kMultiStep ? config.rollout_length : 1;

  GeanModel model;
  model.n_joints = n;
  model.dt = train_set.dt;
  model.history_length = config.history_length;
  model.history_stride = config.history_stride;

  DatasetStats stats = train_set.stats;
  if (!stats.has_feature_stats() || stats.history_length != config.history_length ||
      stats.history_stride != config.history_stride) {
    stats = compute_stats(train_set, arm, config.history_length,
                          config.history_stride);
  }
  model.feature_mean = stats.feature_mean;
  model.feature_std = stats.feature_std;
  model.torque_mean = stats.torque_mean;
  model.torque_std = stats.torque_std;

  std::vector<int> dims{model.input_dim()};
  for (int l = 0; l < config.hidden_layers; ++l) dims.push_back(config.hidden_width);
  dims.push_back(n);
  std::mt19937_64 rng(config.seed);
  model.net = Mlp::init(dims, rng);

  TrainResult result;
  if (config.epochs == 0) {
    result.model = model;
    return result;
  }

  Mat c_table = Mat::Ones(R, n);
  if (config.loss_kind == LossKind::kMultiStep && !config.unit_normalizers) {
    c_table = zero_torque_normalizers(arm, train_set, R);
  }

  std::vector<SampleRef> samples = eligible_samples(model, train_set, R);
  if (samples.empty()) throw std::runtime_error("no eligible training samples");
  const std::vector<SampleRef> val_samples = eligible_samples(model, val_set, R);

  Adam adam(model.net, config.learning_rate, config.adam_beta1,
            config.adam_beta2, config.adam_eps);

  double best_val = eval_loss(model, arm, val_set, val_samples, config, c_table);
  result.curve.push_back(
      {0, eval_loss(model, arm, train_set, samples, config, c_table), best_val});
  GeanModel best = model;
  result.best_epoch = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(samples.begin(), samples.end(), rng);
    double train_total = 0.0;
    std::size_t train_count = 0;
    std::size_t batch_index = 0;
    for (std::size_t i = 0; i < samples.size(); i += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(samples.size(), i + config.batch_size);
      const std::vector<SampleRef> batch(samples.begin() + i, samples.begin() + end);
      LossGradResult r;
      switch (config.loss_kind) {
        case LossKind::kTorque:
          r = torque_loss_grad(model, arm, train_set, batch);
          break;
        case LossKind::kPosition:
          r = position_loss_grad(model, arm, train_set, batch);
          break;
        case LossKind::kMultiStep:
          r = multi_step_loss_grad(model, arm, train_set, batch,
                                   config.rollout_length, c_table);
          break;
      }
      if (!std::isfinite(r.loss)) {
        throw std::runtime_error("non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_index));
      }
      adam.update(model.net, r.grad);
      train_total += r.loss * static_cast<double>(end - i - r.skipped);
      train_count += end - i - r.skipped;
    }
    const double train_loss = train_total / static_cast<double>(train_count);
    const double val_loss =
        eval_loss(model, arm, val_set, val_samples, config, c_table);
    result.curve.push_back({epoch, train_loss, val_loss});
    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      result.best_epoch = epoch;
    }
  }
  result.model = std::move(best);
  return result;
}

EnsembleTrainResult train_ensemble(const GeanConfig& config,
                                   const ArmModel& arm,
                                   const Dataset& train_set,
                                   const Dataset& val_set) {
  config.validate();
  EnsembleTrainResult out;
  out.ensemble.members.resize(config.ensemble_size);
  out.curves.resize(config.ensemble_size);
  for (int i = 0; i < config.ensemble_size; ++i) {
    GeanConfig member = config;
    member.seed = config.seed + static_cast<std::uint64_t>(i);
    TrainResult r = train(member, arm, train_set, val_set);
    out.ensemble.members[i] = std::move(r.model);
    out.curves[i] = std::move(r.curve);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence.

void write_model(const GeanModel& model, std::ostream& os) {
  os << "GEAN-MODEL v1\n";
  os << "n_joints " << model.n_joints << "\n";
  os << "dt " << fmt17(model.dt) << "\n";
  os << "history_length " << model.history_length << "\n";
  os << "history_stride " << model.history_stride << "\n";
  os << "activation tanh\n";
  write_vector(os, "feature_mean", model.feature_mean);
  write_vector(os, "feature_std", model.feature_std);
  write_vector(os, "torque_mean", model.torque_mean);
  write_vector(os, "torque_std", model.torque_std);
  os << "layers " << model.net.layer_count() << "\n";
  for (std::size_t l = 0; l < model.net.layer_count(); ++l) {
    const Mat& w = model.net.weights[l];
    os << "layer " << l << " " << w.rows() << " " << w.cols() << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        os << (c ? " " : "") << fmt17(w(r, c));
      }
      os << "\n";
    }
    write_vector(os, "bias", model.net.biases[l]);
  }
}

namespace {

GeanModel read_model(LineReader& r) {
  if (r.next() != "GEAN-MODEL v1")
    throw r.error("bad or missing version tag (expected GEAN-MODEL v1)");
  GeanModel m;
  m.n_joints = static_cast<int>(r.keyed_int("n_joints"));
  m.dt = r.keyed_double("dt");
  m.history_length = static_cast<int>(r.keyed_int("history_length"));
  m.history_stride = static_cast<int>(r.keyed_int("history_stride"));
  if (r.next() != "activation tanh") throw r.error("unsupported activation");
  m.feature_mean = r.keyed_vector("feature_mean");
  m.feature_std = r.keyed_vector("feature_std");
  m.torque_mean = r.keyed_vector("torque_mean");
  m.torque_std = r.keyed_vector("torque_std");
  const auto layers = static_cast<std::size_t>(r.keyed_int("layers"));
  Eigen::Index expected_in = m.input_dim();
  for (std::size_t l = 0; l < layers; ++l) {
    std::istringstream hs(r.next());
    std::string tag;
    std::size_t idx;
    Eigen::Index rows, cols;
    if (!(hs >> tag >> idx >> rows >> cols) || tag != "layer" || idx != l)
      throw r.error("malformed layer header");
    if (cols != expected_in)
      throw r.error("layer dimension chain mismatch");
    Mat w(rows, cols);
    for (Eigen::Index row = 0; row < rows; ++row) {
      std::istringstream ls(r.next());
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(ls >> w(row, c))) throw r.error("too few weights in row");
      }
    }
    Vec b = r.keyed_vector("bias");
    if (b.size() != rows) throw r.error("bias dimension mismatch");
    m.net.weights.push_back(std::move(w));
    m.net.biases.push_back(std::move(b));
    expected_in = rows;
  }
  if (expected_in != m.n_joints)
    throw r.error("output layer does not match n_joints");
  return m;
}

}  // namespace

void save_model(const GeanModel& model, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_model(model, f);
  f << "end\n";
  if (!f) throw std::runtime_error("write failed for " + path);
}

GeanModel load_model(const std::string& path) {
  LineReader r(path);
  GeanModel m = read_model(r);
  if (r.next() != "end") throw r.error("truncated file: missing end marker");
  return m;
}

void save_ensemble(const Ensemble& ensemble, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "GEAN-ENSEMBLE v1\n";
  f << "members " << ensemble.size() << "\n";
  for (const auto& m : ensemble.members) write_model(m, f);
  f << "end\n";
  if (!f) throw std::runtime_error("write failed for " + path);
}

Ensemble load_ensemble(const std::string& path) {
  LineReader r(path);
  if (r.next() != "GEAN-ENSEMBLE v1")
    throw r.error("bad or missing version tag (expected GEAN-ENSEMBLE v1)");
  const auto members = static_cast<int>(r.keyed_int("members"));
  Ensemble e;
  for (int i = 0; i < members; ++i) e.members.push_back(read_model(r));
  if (r.next() != "end") throw r.error("truncated file: missing end marker");
  return e;
}

void write_train_curve(const std::vector<TrainCurveRow>& curve,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "epoch,train_loss,val_loss\n";
  for (const auto& row : curve) {
    f << row.epoch << "," << fmt17(row.train_loss) << ","
      << fmt17(row.val_loss) << "\n";
  }
}

}  // namespace gean
