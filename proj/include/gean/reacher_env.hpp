// Goal-reaching environment on top of the learned-torque simulator:
// settle-phase reset protocol, rate-limited pressure commands, dense
// reward with action/disagreement/joint-limit penalties, and a random
// shooting controller to exercise the closed loop.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gean/datagen.hpp"
#include "gean/gean.hpp"

namespace gean {

struct EnvConfig {
  int episode_steps = 200;   // agent steps per episode (2 s at 100 Hz)
  int action_repeat = 5;     // simulator sub-steps per agent step
  double delta_u_max = 0.01;
  std::vector<Bounds> u_init_bounds;  // reset command draw, per joint
  std::vector<Bounds> goal_bounds;    // [rad]
  Vec intermediate_pose;              // reset pose [rad]
  int settle_steps = 500;             // simulator steps holding u_init
  double c_act = 1250.0;
  double c_disag = 0.025;
  double c_lim = 1.0;
  double limit_margin = 5.0 * 3.14159265358979323846 / 180.0;  // [rad]

  // Documented 4-joint desk task; other n get symmetric generic bounds.
  static EnvConfig defaults(int n_joints = 4);
  void validate(const ArmModel& arm) const;
};

struct RewardTerms {
  double total = 0.0;
  double dist = 0.0;   // -||q - g||
  double act = 0.0;    // -||delta_u||^2 (post-squash, control units)
  double disag = 0.0;  // -sum_j sigma_j
  double lim = 0.0;    // hinge penalty near joint limits
};

// r = dist + c_act*act + c_disag*disag + c_lim*lim, components returned
// unweighted.
RewardTerms reward_terms(const Vec& q, const Vec& goal, const Vec& delta_u,
                         const Vec& sigma_tau,
                         const std::vector<JointLimit>& limits,
                         const EnvConfig& cfg);

// Mean absolute final error below 2 degrees, strictly.
bool success(const Vec& q_final, const Vec& goal);

struct StepResult {
  Vec observation;  // (q, qdot, u_prev, g), dimension 4n
  double reward = 0.0;
  bool done = false;
  RewardTerms terms;
  Vec disagreement;  // per joint, averaged over the sub-steps
};

// Value-semantic environment; copies are independent, which the shooting
// controller uses for planning rollouts.
class ReacherEnv {
 public:
  ReacherEnv(ArmModel arm, Ensemble ensemble, EnvConfig cfg);

  // Settle-phase reset; same seed reproduces the episode exactly.
  Vec reset(std::uint64_t seed);
  // One agent step: du = delta_u_max * tanh(action), then action_repeat
  // simulator sub-steps, each with a freshly sampled ensemble member
  // (or the ensemble mean when mean_torque is set, for planning).
  // Throws std::logic_error if the episode is already done.
  StepResult step(const Vec& action, bool mean_torque = false);

  const Vec& goal() const { return goal_; }
  const JointState& joint_state() const { return state_; }
  const Vec& command() const { return u_; }
  int steps_done() const { return steps_done_; }
  bool done() const { return steps_done_ >= cfg_.episode_steps; }
  double sim_time() const { return sim_time_; }
  const EnvConfig& config() const { return cfg_; }
  const ArmModel& arm() const { return arm_; }

 private:
  Vec observation() const;
  // Advances one simulator sub-step under command u_ and returns the
  // per-joint disagreement at the pre-step state.
  Vec sim_substep(bool mean_torque);

  ArmModel arm_;
  Ensemble ensemble_;
  EnvConfig cfg_;
  JointState state_;
  Vec u_, goal_;
  std::vector<Vec> q_window_, u_window_;  // oldest first, length H*s+1
  int steps_done_ = 0;
  double sim_time_ = 0.0;
  bool started_ = false;
  std::mt19937_64 rng_;
};

// Random shooting: n_candidates action sequences of `horizon` agent
// steps, evaluated by summed reward on planning copies of the
// environment (ensemble-mean torque); returns the first action of the
// best sequence. Deterministic in (env state, seed).
Vec shooting_controller(const ReacherEnv& env, int horizon, int n_candidates,
                        std::uint64_t seed);

}  // namespace gean
