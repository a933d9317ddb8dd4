#include "gean/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gean/feature.hpp"
#include "gean/io_util.hpp"
#include "gean/parallel.hpp"

namespace gean {

std::size_t Dataset::total_samples() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.size();
  return n;
}

DataParams DataParams::defaults(int n_joints) {
  DataParams p;
  p.control_bounds.assign(n_joints, {-1.0, 1.0});
  if (n_joints == 4) {
    p.u_init_bounds = {{-0.5, 0.5}, {-0.6, 0.0}, {-0.6, 0.4}, {-0.5, 0.5}};
  } else {
    p.u_init_bounds.assign(n_joints, {-0.5, 0.5});
  }
  p.intermediate_pose = Vec::Zero(n_joints);
  const double d = M_PI / 180.0;
  if (n_joints >= 2) p.intermediate_pose[1] = 45 * d;
  if (n_joints >= 3) p.intermediate_pose[2] = 45 * d;
  return p;
}

std::vector<double> natural_cubic_spline(const std::vector<double>& knot_times,
                                         const std::vector<double>& values,
                                         const std::vector<double>& queries) {
  const std::size_t n = knot_times.size();
  if (n != values.size() || n < 2)
    throw std::invalid_argument("spline needs >= 2 knots");
  // Second derivatives with natural boundary (m[0] = m[n-1] = 0), Thomas
  // algorithm on the interior tridiagonal system.
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = knot_times[i + 1] - knot_times[i];
    if (h[i] <= 0) throw std::invalid_argument("knot times must increase");
  }
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;  // interior unknowns
    std::vector<double> diag(k), rhs(k), upper(k);
    for (std::size_t i = 0; i < k; ++i) {
      diag[i] = 2.0 * (h[i] + h[i + 1]);
      upper[i] = h[i + 1];
      rhs[i] = 6.0 * ((values[i + 2] - values[i + 1]) / h[i + 1] -
                      (values[i + 1] - values[i]) / h[i]);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = h[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i >= 1; --i) {
      m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
    }
  }
  std::vector<double> out;
  out.reserve(queries.size());
  for (double t : queries) {
    std::size_t i;
    if (t <= knot_times.front()) {
      i = 0;
    } else if (t >= knot_times.back()) {
      i = n - 2;
    } else {
      i = static_cast<std::size_t>(
              std::upper_bound(knot_times.begin(), knot_times.end(), t) -
              knot_times.begin()) -
          1;
    }
    const double a = (knot_times[i + 1] - t) / h[i];
    const double b = (t - knot_times[i]) / h[i];
    const double y = a * values[i] + b * values[i + 1] +
                     ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) *
                         h[i] * h[i] / 6.0;
    out.push_back(y);
  }
  return out;
}

std::vector<Vec> sample_exploration_controls(std::uint64_t seed,
                                             double duration,
                                             double knot_interval,
                                             const std::vector<Bounds>& bounds,
                                             double dt) {
  if (!(duration >= knot_interval) || !(knot_interval > 0))
    throw std::invalid_argument("need duration >= knot_interval > 0");
  for (const auto& b : bounds)
    if (b.lo > b.hi) throw std::invalid_argument("control bounds lo > hi");

  std::vector<double> knot_times;
  for (double t = 0.0; t < duration - 1e-9; t += knot_interval)
    knot_times.push_back(t);
  knot_times.push_back(duration);

  const int n = static_cast<int>(bounds.size());
  const std::size_t steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> queries(steps);
  for (std::size_t k = 0; k < steps; ++k) queries[k] = static_cast<double>(k) * dt;

  std::mt19937_64 rng(seed);
  std::vector<Vec> controls(steps, Vec(n));
  for (int j = 0; j < n; ++j) {
    std::uniform_real_distribution<double> dist(bounds[j].lo, bounds[j].hi);
    std::vector<double> knots(knot_times.size());
    for (auto& v : knots) v = dist(rng);
    const std::vector<double> vals = natural_cubic_spline(knot_times, knots, queries);
    for (std::size_t k = 0; k < steps; ++k)
      controls[k][j] = std::clamp(vals[k], bounds[j].lo, bounds[j].hi);
  }
  return controls;
}

namespace {

Trajectory collect_one(const PlantModel& plant, const ArmModel& arm,
                       const DataParams& params, int traj_index) {
  std::seed_seq sseq{params.seed, static_cast<std::uint64_t>(traj_index),
                     std::uint64_t{0x9e3779b97f4a7c15ULL}};
  std::mt19937_64 rng(sseq);
  const int n = arm.n_joints;

  Vec u_init(n);
  for (int j = 0; j < n; ++j) {
    std::uniform_real_distribution<double> dist(params.u_init_bounds[j].lo,
                                                params.u_init_bounds[j].hi);
    u_init[j] = dist(rng);
  }
  const std::uint64_t knot_seed = rng();

  std::vector<Vec> controls(params.settle_steps, u_init);
  const std::vector<Vec> spline = sample_exploration_controls(
      knot_seed, params.traj_duration, params.knot_interval,
      params.control_bounds, arm.dt);
  controls.insert(controls.end(), spline.begin(), spline.end());

  JointState init{params.intermediate_pose, Vec::Zero(n)};
  Trajectory full =
      plant_rollout(plant, arm, init, controls, PlantState::rest(plant));

  // Drop the settle phase and re-time from zero.
  Trajectory traj;
  traj.dt = arm.dt;
  const std::size_t offset = static_cast<std::size_t>(params.settle_steps);
  for (std::size_t k = offset; k < full.size(); ++k) {
    traj.t.push_back(static_cast<double>(k - offset) * arm.dt);
    traj.q.push_back(full.q[k]);
    traj.u.push_back(full.u[k]);
  }
  if (params.position_noise_std > 0) {
    std::normal_distribution<double> noise(0.0, params.position_noise_std);
    for (auto& q : traj.q)
      for (int j = 0; j < n; ++j) q[j] += noise(rng);
  }
  return traj;
}

}  // namespace

Dataset collect_dataset(const PlantModel& plant, const ArmModel& arm,
                        const DataParams& params) {
  if (params.n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  Dataset ds;
  ds.n_joints = arm.n_joints;
  ds.dt = arm.dt;
  ds.joint_limits = arm.joint_limits;
  ds.trajectories.resize(params.n_traj);
  parallel_for(params.n_traj, [&](std::int64_t i) {
    ds.trajectories[i] = collect_one(plant, arm, params, static_cast<int>(i));
  });
  ds.stats = compute_stats(ds, arm, 3, 1);
  return ds;
}

FiniteDiffLabels finite_diff_labels(const Trajectory& traj) {
  const std::size_t size = traj.size();
  if (size < 3) throw std::invalid_argument("trajectory too short (need >= 3)");
  FiniteDiffLabels out;
  const double dt = traj.dt;
  for (std::size_t t = 1; t + 1 < size; ++t) {
    out.qdot.push_back((traj.q[t] - traj.q[t - 1]) / dt);
    out.qddot.push_back((traj.q[t + 1] - 2.0 * traj.q[t] + traj.q[t - 1]) /
                        (dt * dt));
  }
  return out;
}

std::vector<Vec> torque_labels(const ArmModel& arm, const Trajectory& traj) {
  const FiniteDiffLabels fd = finite_diff_labels(traj);
  std::vector<Vec> labels;
  labels.reserve(fd.qdot.size());
  for (std::size_t i = 0; i < fd.qdot.size(); ++i) {
    const std::size_t t = i + 1;
    labels.push_back(inverse_dynamics(arm, traj.q[t], fd.qdot[i], fd.qddot[i]));
  }
  return labels;
}

DatasetStats compute_stats(const Dataset& ds, const ArmModel& arm,
                           int history_length, int history_stride) {
  const int H = history_length;
  const int s = history_stride;
  const int n = ds.n_joints;
  const int fdim = 2 * n * (H + 1);
  const std::size_t warmup = static_cast<std::size_t>(H) * s;

  Vec fsum = Vec::Zero(fdim), fsq = Vec::Zero(fdim);
  Vec tsum = Vec::Zero(n), tsq = Vec::Zero(n);
  std::size_t count = 0;
  for (const auto& traj : ds.trajectories) {
    if (traj.size() < 3) continue;
    const std::vector<Vec> labels = torque_labels(arm, traj);
    const std::size_t t_begin = std::max<std::size_t>(1, warmup);
    for (std::size_t t = t_begin; t + 1 < traj.size(); ++t) {
      const Vec f = delta_features(traj, t, H, s);
      fsum += f;
      fsq += f.cwiseProduct(f);
      const Vec& tau = labels[t - 1];
      tsum += tau;
      tsq += tau.cwiseProduct(tau);
      ++count;
    }
  }
  if (count == 0) throw std::runtime_error("no eligible samples for statistics");

  DatasetStats st;
  st.history_length = H;
  st.history_stride = s;
  const double inv = 1.0 / static_cast<double>(count);
  st.feature_mean = fsum * inv;
  st.feature_std =
      ((fsq * inv - st.feature_mean.cwiseProduct(st.feature_mean)).cwiseMax(0.0))
          .cwiseSqrt()
          .cwiseMax(1e-12);
  st.torque_mean = tsum * inv;
  st.torque_std =
      ((tsq * inv - st.torque_mean.cwiseProduct(st.torque_mean)).cwiseMax(0.0))
          .cwiseSqrt();
  if ((st.torque_std.array() <= 0).any())
    throw std::runtime_error("degenerate dataset: zero torque variance");
  return st;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds,
                                          double train_fraction,
                                          std::uint64_t seed,
                                          const ArmModel& arm) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  const std::size_t n = ds.trajectories.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw std::invalid_argument("split leaves an empty train or val set");

  Dataset train, val;
  train.n_joints = val.n_joints = ds.n_joints;
  train.dt = val.dt = ds.dt;
  train.joint_limits = val.joint_limits = ds.joint_limits;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : val).trajectories.push_back(ds.trajectories[idx[i]]);
  }
  const int H = ds.stats.history_length > 0 ? ds.stats.history_length : 3;
  const int s = ds.stats.history_stride > 0 ? ds.stats.history_stride : 1;
  train.stats = compute_stats(train, arm, H, s);
  val.stats = train.stats;
  return {train, val};
}

// ---------------------------------------------------------------------------
// Persistence. Self-describing text container, full double precision.

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "GEAN-DATASET v1\n";
  f << "n_joints " << ds.n_joints << "\n";
  f << "dt " << fmt17(ds.dt) << "\n";
  f << "n_trajectories " << ds.trajectories.size() << "\n";
  for (int j = 0; j < ds.n_joints; ++j) {
    f << "limit " << j << " " << fmt17(ds.joint_limits[j].lo) << " "
      << fmt17(ds.joint_limits[j].hi) << "\n";
  }
  f << "stats_begin\n";
  f << "history_length " << ds.stats.history_length << "\n";
  f << "history_stride " << ds.stats.history_stride << "\n";
  write_vector(f, "feature_mean", ds.stats.feature_mean);
  write_vector(f, "feature_std", ds.stats.feature_std);
  write_vector(f, "torque_mean", ds.stats.torque_mean);
  write_vector(f, "torque_std", ds.stats.torque_std);
  f << "stats_end\n";
  for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
    const auto& traj = ds.trajectories[i];
    f << "trajectory " << i << " " << traj.size() << "\n";
    f << "step,t";
    for (int j = 0; j < ds.n_joints; ++j) f << ",q" << j;
    for (int j = 0; j < ds.n_joints; ++j) f << ",u" << j;
    f << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
      f << k << "," << fmt17(traj.t[k]);
      for (int j = 0; j < ds.n_joints; ++j) f << "," << fmt17(traj.q[k][j]);
      for (int j = 0; j < ds.n_joints; ++j) f << "," << fmt17(traj.u[k][j]);
      f << "\n";
    }
  }
  f << "end\n";
  if (!f) throw std::runtime_error("write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  LineReader r(path);
  if (r.next() != "GEAN-DATASET v1")
    throw r.error("bad or missing version tag (expected GEAN-DATASET v1)");
  Dataset ds;
  ds.n_joints = static_cast<int>(r.keyed_int("n_joints"));
  ds.dt = r.keyed_double("dt");
  const auto n_traj = static_cast<std::size_t>(r.keyed_int("n_trajectories"));
  ds.joint_limits.resize(ds.n_joints);
  for (int j = 0; j < ds.n_joints; ++j) {
    std::istringstream ls(r.next());
    std::string tag;
    int idx;
    double lo, hi;
    if (!(ls >> tag >> idx >> lo >> hi) || tag != "limit" || idx != j)
      throw r.error("malformed joint limit line");
    ds.joint_limits[j] = {lo, hi};
  }
  if (r.next() != "stats_begin") throw r.error("expected stats_begin");
  ds.stats.history_length = static_cast<int>(r.keyed_int("history_length"));
  ds.stats.history_stride = static_cast<int>(r.keyed_int("history_stride"));
  ds.stats.feature_mean = r.keyed_vector("feature_mean");
  ds.stats.feature_std = r.keyed_vector("feature_std");
  ds.stats.torque_mean = r.keyed_vector("torque_mean");
  ds.stats.torque_std = r.keyed_vector("torque_std");
  if (r.next() != "stats_end") throw r.error("expected stats_end");

  ds.trajectories.resize(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) {
    std::istringstream hs(r.next());
    std::string tag;
    std::size_t idx, size;
    if (!(hs >> tag >> idx >> size) || tag != "trajectory" || idx != i)
      throw r.error("malformed trajectory header");
    r.next();  // column header
    Trajectory traj;
    traj.dt = ds.dt;
    traj.t.resize(size);
    traj.q.assign(size, Vec(ds.n_joints));
    traj.u.assign(size, Vec(ds.n_joints));
    for (std::size_t k = 0; k < size; ++k) {
      const std::vector<double> row = r.csv_row(2 + 2 * ds.n_joints);
      if (static_cast<std::size_t>(std::llround(row[0])) != k)
        throw r.error("step index mismatch in trajectory block");
      traj.t[k] = row[1];
      for (int j = 0; j < ds.n_joints; ++j) {
        traj.q[k][j] = row[2 + j];
        traj.u[k][j] = row[2 + ds.n_joints + j];
      }
    }
    ds.trajectories[i] = std::move(traj);
  }
  if (r.next() != "end") throw r.error("truncated file: missing end marker");
  return ds;
}

}  // namespace gean
