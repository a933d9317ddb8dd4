#include "gean/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gean/io_util.hpp"
#include "gean/parallel.hpp"

namespace gean {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace

std::string torque_provider_name(TorqueProvider p) {
  switch (p) {
    case TorqueProvider::kZero: return "zero";
    case TorqueProvider::kLabels: return "labels";
    case TorqueProvider::kModel: return "model";
    case TorqueProvider::kEnsemble: return "ensemble";
  }
  return "?";
}

const HorizonReport& ReplayReport::at_horizon(int steps) const {
  for (const auto& h : horizons)
    if (h.horizon_steps == steps) return h;
  throw std::invalid_argument("no report for requested horizon");
}

namespace {

// Per-trajectory replay engine: lockstep rollout from all start points,
// returning the per-horizon MAE (degrees, mean over joints and starts).
// Returns false if the trajectory has no eligible start.
bool replay_one(const ArmModel& arm, const Trajectory& traj, int traj_index,
                TorqueProvider provider, const GeanModel* model,
                const Ensemble* ensemble, const ReplayConfig& cfg, int warmup,
                std::vector<double>& out_mae) {
  const int size = static_cast<int>(traj.size());
  const int n = traj.n_joints();
  const int max_h = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());

  std::vector<int> starts;
  for (int t0 = std::max(1, warmup); t0 + max_h < size; t0 += cfg.start_stride)
    starts.push_back(t0);
  if (starts.empty()) return false;
  const int n_starts = static_cast<int>(starts.size());

  // Simulated positions per start, indexed by rollout offset; offset 0 is
  // the logged start state. A start whose rollout leaves the finite range
  // is frozen and scored with a capped 180-degree error from then on.
  std::vector<std::vector<Vec>> qhat(n_starts);
  std::vector<Vec> qdot(n_starts);
  std::vector<char> diverged(n_starts, 0);
  for (int i = 0; i < n_starts; ++i) {
    qhat[i].assign(max_h + 1, Vec());
    qhat[i][0] = traj.q[starts[i]];
    qdot[i] = (traj.q[starts[i]] - traj.q[starts[i] - 1]) / traj.dt;
  }

  std::vector<Vec> labels;
  if (provider == TorqueProvider::kLabels) labels = torque_labels(arm, traj);

  std::seed_seq ss{cfg.seed, static_cast<std::uint64_t>(traj_index),
                   std::uint64_t{0x7265706c61790000}};
  std::mt19937_64 member_rng(ss);

  const bool uses_net = provider == TorqueProvider::kModel ||
                        provider == TorqueProvider::kEnsemble;
  const GeanModel* feature_model =
      model ? model : (ensemble && !ensemble->members.empty()
                           ? &ensemble->members.front()
                           : nullptr);
  Mat features, out;
  Vec raw;
  if (uses_net) {
    features.resize(n_starts, feature_model->input_dim());
    raw.resize(feature_model->input_dim());
  }

  out_mae.assign(cfg.horizons.size(), 0.0);
  for (int h = 0; h < max_h; ++h) {
    const GeanModel* net = model;
    if (provider == TorqueProvider::kEnsemble) {
      std::uniform_int_distribution<int> pick(0, ensemble->size() - 1);
      net = &ensemble->members[pick(member_rng)];
    }
    if (uses_net) {
      for (int i = 0; i < n_starts; ++i) {
        rollout_features(*net, traj, starts[i], h, qhat[i], raw);
        features.row(i) =
            (raw - net->feature_mean).cwiseQuotient(net->feature_std).transpose();
      }
      out = mlp_forward(net->net, features);
    }
    for (int i = 0; i < n_starts; ++i) {
      if (diverged[i]) {
        qhat[i][h + 1] = qhat[i][h];
        continue;
      }
      Vec tau;
      switch (provider) {
        case TorqueProvider::kZero:
          tau = Vec::Zero(n);
          break;
        case TorqueProvider::kLabels:
          // labels[j] holds the torque for step t = j + 1.
          tau = labels[starts[i] + h - 1];
          break;
        default:
          tau = out.row(i).transpose().cwiseProduct(net->torque_std) +
                net->torque_mean;
      }
      bool ok = tau.allFinite();
      if (ok) {
        try {
          const JointState next = step(arm, {qhat[i][h], qdot[i]}, tau);
          ok = next.q.allFinite() && next.qdot.allFinite();
          if (ok) {
            qhat[i][h + 1] = next.q;
            qdot[i] = next.qdot;
          }
        } catch (const std::runtime_error&) {
          ok = false;  // non-SPD mass matrix from a blown-up state
        }
      }
      if (!ok) {
        diverged[i] = 1;
        qhat[i][h + 1] = qhat[i][h];
      }
    }
    for (std::size_t k = 0; k < cfg.horizons.size(); ++k) {
      if (cfg.horizons[k] != h + 1) continue;
      double acc = 0.0;
      for (int i = 0; i < n_starts; ++i) {
        const double err =
            diverged[i]
                ? kPi
                : std::min(
                      kPi,
                      (qhat[i][h + 1] - traj.q[starts[i] + h + 1]).cwiseAbs().mean());
        acc += err;
      }
      out_mae[k] = acc / n_starts * kRadToDeg;
    }
  }
  return true;
}

// Per-trajectory means for every horizon; outer index = horizon.
std::vector<std::vector<double>> per_traj_errors(const ArmModel& arm,
                                                 const Dataset& test_set,
                                                 TorqueProvider provider,
                                                 const GeanModel* model,
                                                 const Ensemble* ensemble,
                                                 const ReplayConfig& cfg,
                                                 int warmup) {
  const auto n_traj = static_cast<std::int64_t>(test_set.trajectories.size());
  std::vector<std::vector<double>> mae(n_traj);
  std::vector<char> ok(n_traj, 0);
  for_each_chunk(n_traj, [&](int, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      ok[i] = replay_one(arm, test_set.trajectories[i], static_cast<int>(i),
                         provider, model, ensemble, cfg, warmup, mae[i]);
    }
  });
  std::vector<std::vector<double>> by_horizon(cfg.horizons.size());
  for (std::int64_t i = 0; i < n_traj; ++i) {
    if (!ok[i]) continue;
    for (std::size_t k = 0; k < cfg.horizons.size(); ++k)
      by_horizon[k].push_back(mae[i][k]);
  }
  if (by_horizon.empty() || by_horizon[0].empty())
    throw std::runtime_error("no trajectory admits the requested horizons");
  return by_horizon;
}

}  // namespace

ReplayReport replay_error(const ArmModel& arm, const Dataset& test_set,
                          TorqueProvider provider, const GeanModel* model,
                          const Ensemble* ensemble, const ReplayConfig& cfg) {
  if (cfg.horizons.empty()) throw std::invalid_argument("no horizons requested");
  if (provider == TorqueProvider::kModel && !model)
    throw std::invalid_argument("model provider needs a model");
  if (provider == TorqueProvider::kEnsemble &&
      (!ensemble || ensemble->members.empty()))
    throw std::invalid_argument("ensemble provider needs a non-empty ensemble");

  int warmup = 1;
  if (model) {
    warmup = model->history_length * model->history_stride;
  } else if (ensemble && !ensemble->members.empty()) {
    const auto& m = ensemble->members.front();
    warmup = m.history_length * m.history_stride;
  }

  const auto errors = per_traj_errors(arm, test_set, provider, model, ensemble,
                                      cfg, warmup);
  std::vector<std::vector<double>> baseline;
  if (provider == TorqueProvider::kZero) {
    baseline = errors;
  } else {
    baseline = per_traj_errors(arm, test_set, TorqueProvider::kZero, model,
                               ensemble, cfg, warmup);
  }

  std::mt19937_64 boot_rng(cfg.seed);
  ReplayReport report;
  for (std::size_t k = 0; k < cfg.horizons.size(); ++k) {
    const std::vector<double>& v = errors[k];
    const int n = static_cast<int>(v.size());
    HorizonReport h;
    h.horizon_steps = cfg.horizons[k];
    h.per_traj_deg = v;
    h.n_traj = n;
    h.mean_deg = std::accumulate(v.begin(), v.end(), 0.0) / n;
    h.zero_baseline_deg =
        std::accumulate(baseline[k].begin(), baseline[k].end(), 0.0) / n;
    if (n > 1 && cfg.bootstrap_resamples > 0) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      std::vector<double> means(cfg.bootstrap_resamples);
      for (int b = 0; b < cfg.bootstrap_resamples; ++b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += v[pick(boot_rng)];
        means[b] = acc / n;
      }
      std::sort(means.begin(), means.end());
      const auto lo = static_cast<std::size_t>(0.025 * (means.size() - 1));
      const auto hi = static_cast<std::size_t>(
          std::ceil(0.975 * (means.size() - 1)));
      h.ci_lo_deg = means[lo];
      h.ci_hi_deg = means[hi];
    } else {
      h.ci_lo_deg = h.ci_hi_deg = h.mean_deg;
    }
    report.horizons.push_back(std::move(h));
  }
  return report;
}

double mean_disagreement(const Ensemble& ensemble, const Dataset& data,
                         int sample_stride) {
  if (ensemble.members.empty()) throw std::invalid_argument("empty ensemble");
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
  const auto& m = ensemble.members.front();
  const int warmup = m.history_length * m.history_stride;
  double total = 0.0;
  std::int64_t count = 0;
  for (const auto& traj : data.trajectories) {
    for (int t = warmup; t < static_cast<int>(traj.size()); t += sample_stride) {
      std::vector<Vec> q_window(traj.q.begin() + (t - warmup),
                                traj.q.begin() + (t + 1));
      std::vector<Vec> u_window(traj.u.begin() + (t - warmup),
                                traj.u.begin() + (t + 1));
      total += disagreement(ensemble, q_window, u_window).mean();
      ++count;
    }
  }
  if (count == 0) throw std::runtime_error("no eligible windows");
  return total / static_cast<double>(count);
}

namespace {

Dataset truncate_dataset(const Dataset& ds, int n_traj) {
  if (n_traj < 1 || n_traj > static_cast<int>(ds.trajectories.size()))
    throw std::invalid_argument("dataset-size ablation exceeds available data");
  Dataset out;
  out.n_joints = ds.n_joints;
  out.dt = ds.dt;
  out.joint_limits = ds.joint_limits;
  out.trajectories.assign(ds.trajectories.begin(),
                          ds.trajectories.begin() + n_traj);
  return out;  // stats left empty; train() recomputes them
}

AblationRow train_and_eval(const ArmModel& arm, const Dataset& train_set,
                           const Dataset& val_set, const Dataset& test_set,
                           const GeanConfig& config, const ReplayConfig& replay,
                           GeanModel* out_model = nullptr) {
  TrainResult r = train(config, arm, train_set, val_set);
  AblationRow row;
  row.provider = loss_kind_name(config.loss_kind);
  row.report = replay_error(arm, test_set, TorqueProvider::kModel, &r.model,
                            nullptr, replay);
  if (out_model) *out_model = std::move(r.model);
  return row;
}

}  // namespace

std::vector<AblationRow> ablate_loss(const ArmModel& arm,
                                     const Dataset& train_set,
                                     const Dataset& val_set,
                                     const Dataset& test_set,
                                     const std::vector<LossKind>& losses,
                                     const std::vector<std::uint64_t>& seeds,
                                     const GeanConfig& base,
                                     const ReplayConfig& replay) {
  std::vector<AblationRow> rows;
  for (LossKind loss : losses) {
    for (std::uint64_t seed : seeds) {
      GeanConfig cfg = base;
      cfg.loss_kind = loss;
      cfg.seed = seed;
      AblationRow row =
          train_and_eval(arm, train_set, val_set, test_set, cfg, replay);
      row.swept = {{"seed", static_cast<double>(seed)}};
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<AblationRow> ablate_dataset_size(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& sizes,
    const std::vector<std::uint64_t>& seeds, const GeanConfig& base,
    const ReplayConfig& replay) {
  std::vector<AblationRow> rows;
  for (int size : sizes) {
    const Dataset subset = truncate_dataset(train_set, size);
    Ensemble seed_models;
    std::vector<std::size_t> row_indices;
    for (std::uint64_t seed : seeds) {
      GeanConfig cfg = base;
      cfg.seed = seed;
      GeanModel trained;
      AblationRow row =
          train_and_eval(arm, subset, val_set, test_set, cfg, replay, &trained);
      row.swept = {{"train_traj", static_cast<double>(size)},
                   {"seed", static_cast<double>(seed)}};
      seed_models.members.push_back(std::move(trained));
      row_indices.push_back(rows.size());
      rows.push_back(std::move(row));
    }
    // The per-seed models form an ensemble for the disagreement metric.
    const double dis = seed_models.size() > 1
                           ? mean_disagreement(seed_models, test_set)
                           : 0.0;
    for (std::size_t i : row_indices) rows[i].disagreement = dis;
  }
  return rows;
}

std::vector<AblationRow> ablate_history(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& lengths,
    const std::vector<int>& strides, const std::vector<std::uint64_t>& seeds,
    const GeanConfig& base, const ReplayConfig& replay) {
  std::vector<AblationRow> rows;
  for (int H : lengths) {
    for (int s : strides) {
      for (std::uint64_t seed : seeds) {
        GeanConfig cfg = base;
        cfg.history_length = H;
        cfg.history_stride = s;
        cfg.seed = seed;
        AblationRow row =
            train_and_eval(arm, train_set, val_set, test_set, cfg, replay);
        row.swept = {{"history_length", static_cast<double>(H)},
                     {"history_stride", static_cast<double>(s)},
                     {"seed", static_cast<double>(seed)}};
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<AblationRow> ablate_rollout_length(
    const ArmModel& arm, const Dataset& train_set, const Dataset& val_set,
    const Dataset& test_set, const std::vector<int>& rollout_lengths,
    const std::vector<std::uint64_t>& seeds, const GeanConfig& base,
    const ReplayConfig& replay) {
  std::vector<AblationRow> rows;
  for (int R : rollout_lengths) {
    for (std::uint64_t seed : seeds) {
      GeanConfig cfg = base;
      cfg.loss_kind = LossKind::kMultiStep;
      cfg.rollout_length = R;
      cfg.seed = seed;
      AblationRow row =
          train_and_eval(arm, train_set, val_set, test_set, cfg, replay);
      row.swept = {{"rollout_length", static_cast<double>(R)},
                   {"seed", static_cast<double>(seed)}};
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

void write_report_rows(std::ostream& os, const ReplayReport& report,
                       const std::string& provider, const std::string& extra) {
  for (const auto& h : report.horizons) {
    os << "replay_mae," << provider << "," << h.horizon_steps << ","
       << fmt17(h.mean_deg) << "," << fmt17(h.ci_lo_deg) << ","
       << fmt17(h.ci_hi_deg) << "," << h.n_traj << extra << "\n";
    os << "zero_baseline,zero," << h.horizon_steps << ","
       << fmt17(h.zero_baseline_deg) << "," << fmt17(h.zero_baseline_deg)
       << "," << fmt17(h.zero_baseline_deg) << "," << h.n_traj << extra
       << "\n";
  }
}

}  // namespace

void write_replay_csv(const ReplayReport& report, const std::string& provider,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "metric,provider,horizon_steps,mean_deg,ci_lo,ci_hi,n_traj\n";
  write_report_rows(f, report, provider, "");
}

void write_ablation_csv(const std::vector<AblationRow>& rows,
                        const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("no ablation rows");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "metric,provider,horizon_steps,mean_deg,ci_lo,ci_hi,n_traj";
  for (const auto& kv : rows.front().swept) f << "," << kv.first;
  f << ",disagreement\n";
  for (const auto& row : rows) {
    std::string extra;
    for (const auto& kv : row.swept) extra += "," + fmt17(kv.second);
    extra += "," + fmt17(row.disagreement);
    write_report_rows(f, row.report, row.provider, extra);
  }
}

}  // namespace gean
