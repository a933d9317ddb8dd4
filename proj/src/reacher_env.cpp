#include "gean/reacher_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gean {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kSuccessThreshold = 2.0 * kDegToRad;

}  // namespace

EnvConfig EnvConfig::defaults(int n_joints) {
  EnvConfig cfg;
  if (n_joints == 4) {
    cfg.u_init_bounds = {{-0.5, 0.5}, {-0.6, 0.0}, {-0.6, 0.4}, {-0.5, 0.5}};
    cfg.goal_bounds = {{-50.0 * kDegToRad, 50.0 * kDegToRad},
                       {20.0 * kDegToRad, 55.0 * kDegToRad},
                       {-50.0 * kDegToRad, 50.0 * kDegToRad},
                       {-50.0 * kDegToRad, 50.0 * kDegToRad}};
    cfg.intermediate_pose = Vec(4);
    cfg.intermediate_pose << 0.0, 45.0 * kDegToRad, 45.0 * kDegToRad, 0.0;
  } else {
    cfg.u_init_bounds.assign(n_joints, {-0.5, 0.5});
    cfg.goal_bounds.assign(n_joints, {-50.0 * kDegToRad, 50.0 * kDegToRad});
    cfg.intermediate_pose = Vec::Zero(n_joints);
  }
  return cfg;
}

void EnvConfig::validate(const ArmModel& arm) const {
  const auto n = static_cast<std::size_t>(arm.n_joints);
  if (u_init_bounds.size() != n || goal_bounds.size() != n ||
      intermediate_pose.size() != arm.n_joints)
    throw std::invalid_argument("env config dimensions do not match the arm");
  for (const auto& b : u_init_bounds)
    if (!(b.lo <= b.hi) || b.lo < -1.0 || b.hi > 1.0)
      throw std::invalid_argument("u_init bounds must be ordered within [-1,1]");
  for (const auto& b : goal_bounds)
    if (!(b.lo <= b.hi))
      throw std::invalid_argument("goal bounds must be ordered");
  if (episode_steps < 1 || action_repeat < 1 || settle_steps < 0)
    throw std::invalid_argument("episode/repeat/settle counts out of range");
  if (delta_u_max <= 0 || limit_margin <= 0)
    throw std::invalid_argument("delta_u_max and limit_margin must be > 0");
  if (c_act < 0 || c_disag < 0 || c_lim < 0)
    throw std::invalid_argument("reward weights must be >= 0");
}

RewardTerms reward_terms(const Vec& q, const Vec& goal, const Vec& delta_u,
                         const Vec& sigma_tau,
                         const std::vector<JointLimit>& limits,
                         const EnvConfig& cfg) {
  RewardTerms r;
  r.dist = -(q - goal).norm();
  r.act = -delta_u.squaredNorm();
  r.disag = -sigma_tau.sum();
  for (int j = 0; j < q.size(); ++j) {
    const double center = 0.5 * (limits[j].lo + limits[j].hi);
    const double halfrange = 0.5 * (limits[j].hi - limits[j].lo);
    const double excess =
        std::abs(q[j] - center) - (halfrange - cfg.limit_margin);
    if (excess > 0) r.lim -= excess / cfg.limit_margin;
  }
  r.total = r.dist + cfg.c_act * r.act + cfg.c_disag * r.disag +
            cfg.c_lim * r.lim;
  return r;
}

bool success(const Vec& q_final, const Vec& goal) {
  return (q_final - goal).cwiseAbs().mean() < kSuccessThreshold;
}

ReacherEnv::ReacherEnv(ArmModel arm, Ensemble ensemble, EnvConfig cfg)
    : arm_(std::move(arm)), ensemble_(std::move(ensemble)), cfg_(std::move(cfg)) {
  arm_.validate();
  cfg_.validate(arm_);
  if (ensemble_.members.empty())
    throw std::invalid_argument("environment needs a non-empty ensemble");
  for (const auto& m : ensemble_.members) {
    const auto& first = ensemble_.members.front();
    if (m.n_joints != arm_.n_joints || m.dt != arm_.dt ||
        m.history_length != first.history_length ||
        m.history_stride != first.history_stride)
      throw std::invalid_argument("ensemble members incompatible with the arm");
  }
}

Vec ReacherEnv::observation() const {
  const int n = arm_.n_joints;
  Vec obs(4 * n);
  obs.segment(0, n) = state_.q;
  obs.segment(n, n) = state_.qdot;
  obs.segment(2 * n, n) = u_;
  obs.segment(3 * n, n) = goal_;
  return obs;
}

Vec ReacherEnv::sim_substep(bool mean_torque) {
  Vec sigma = Vec::Zero(arm_.n_joints);
  Vec tau;
  if (mean_torque || ensemble_.size() == 1) {
    tau = Vec::Zero(arm_.n_joints);
    Vec sum_sq = Vec::Zero(arm_.n_joints);
    for (const auto& m : ensemble_.members) {
      const Vec t = predict_torque(m, q_window_, u_window_);
      tau += t;
      sum_sq += t.cwiseProduct(t);
    }
    tau /= ensemble_.size();
    sigma = (sum_sq / ensemble_.size() - tau.cwiseProduct(tau))
                .cwiseMax(0.0)
                .cwiseSqrt();
  } else {
    sigma = disagreement(ensemble_, q_window_, u_window_);
    std::uniform_int_distribution<int> pick(0, ensemble_.size() - 1);
    tau = predict_torque(ensemble_.members[pick(rng_)], q_window_, u_window_);
  }
  state_ = gean::step(arm_, state_, tau);
  for (int j = 0; j < arm_.n_joints; ++j) {
    const auto& lim = arm_.joint_limits[j];
    if (state_.q[j] < lim.lo) {
      state_.q[j] = lim.lo;
      state_.qdot[j] = 0.0;
    } else if (state_.q[j] > lim.hi) {
      state_.q[j] = lim.hi;
      state_.qdot[j] = 0.0;
    }
  }
  sim_time_ += arm_.dt;
  q_window_.erase(q_window_.begin());
  q_window_.push_back(state_.q);
  u_window_.erase(u_window_.begin());
  u_window_.push_back(u_);
  return sigma;
}

Vec ReacherEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  const int n = arm_.n_joints;
  u_ = Vec(n);
  goal_ = Vec(n);
  for (int j = 0; j < n; ++j) {
    u_[j] = std::uniform_real_distribution<double>(cfg_.u_init_bounds[j].lo,
                                                   cfg_.u_init_bounds[j].hi)(rng_);
  }
  for (int j = 0; j < n; ++j) {
    goal_[j] = std::uniform_real_distribution<double>(cfg_.goal_bounds[j].lo,
                                                      cfg_.goal_bounds[j].hi)(rng_);
  }
  state_ = {cfg_.intermediate_pose, Vec::Zero(n)};
  const int window = ensemble_.members.front().window_size();
  q_window_.assign(window, state_.q);
  u_window_.assign(window, u_);
  for (int k = 0; k < cfg_.settle_steps; ++k) sim_substep(false);
  steps_done_ = 0;
  sim_time_ = 0.0;
  started_ = true;
  return observation();
}

StepResult ReacherEnv::step(const Vec& action, bool mean_torque) {
  if (!started_) throw std::logic_error("step() before reset()");
  if (done()) throw std::logic_error("step() on a finished episode");
  if (action.size() != arm_.n_joints)
    throw std::invalid_argument("action has wrong dimension");

  const Vec delta_u = cfg_.delta_u_max * action.array().tanh().matrix();
  u_ = (u_ + delta_u).cwiseMax(-1.0).cwiseMin(1.0);

  Vec sigma = Vec::Zero(arm_.n_joints);
  for (int k = 0; k < cfg_.action_repeat; ++k) sigma += sim_substep(mean_torque);
  sigma /= cfg_.action_repeat;
  ++steps_done_;

  StepResult result;
  result.terms =
      reward_terms(state_.q, goal_, delta_u, sigma, arm_.joint_limits, cfg_);
  result.reward = result.terms.total;
  result.done = done();
  result.disagreement = std::move(sigma);
  result.observation = observation();
  return result;
}

Vec shooting_controller(const ReacherEnv& env, int horizon, int n_candidates,
                        std::uint64_t seed) {
  if (horizon < 1 || n_candidates < 1)
    throw std::invalid_argument("horizon and n_candidates must be >= 1");
  const int n = env.arm().n_joints;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(0.0, 1.0);

  Vec best_first = Vec::Zero(n);
  double best_return = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < n_candidates; ++c) {
    std::vector<Vec> plan(horizon, Vec(n));
    for (auto& a : plan)
      for (int j = 0; j < n; ++j) a[j] = draw(rng);
    ReacherEnv sim = env;
    double ret = 0.0;
    for (int h = 0; h < horizon && !sim.done(); ++h) {
      ret += sim.step(plan[h], true).reward;
    }
    if (ret > best_return) {
      best_return = ret;
      best_first = plan.front();
    }
  }
  return best_first;
}

}  // namespace gean
