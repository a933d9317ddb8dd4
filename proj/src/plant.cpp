#include "gean/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gean {

void PlantModel::validate() const {
  if (joints.empty()) throw std::invalid_argument("plant has no joints");
  for (const auto& j : joints) {
    if (j.pressure_time_constant <= 0)
      throw std::invalid_argument("pressure_time_constant must be > 0");
    if (j.max_pressure <= 0 || j.max_pressure > 1)
      throw std::invalid_argument("max_pressure must be in (0, 1]");
    if (j.coulomb_friction < 0 || j.viscous_friction < 0 ||
        j.friction_angle_gain < 0)
      throw std::invalid_argument("friction terms must be >= 0");
    if (j.hysteresis_width < 0)
      throw std::invalid_argument("hysteresis_width must be >= 0");
  }
}

PlantModel PlantModel::default_messy(int n) {
  PlantModel p;
  p.joints.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& j = p.joints[i];
    j.pressure_time_constant = 0.05;
    j.max_pressure = 1.0;
    j.force_gain = std::max(1.2, 5.0 - 1.3 * i);
    j.shape_c1 = 0.0;
    j.shape_c2 = -0.15;
    j.shape_c3 = 0.0;
    j.coulomb_friction = std::max(0.1, 0.4 - 0.1 * i);
    j.viscous_friction = std::max(0.15, 0.5 - 0.1 * i);
    j.friction_angle_gain = 0.5;
    j.hysteresis_width = 0.08;
  }
  p.validate();
  return p;
}

PlantModel PlantModel::easy(int n) {
  PlantModel p = default_messy(n);
  for (auto& j : p.joints) {
    // Near-instant pressures and no friction or hysteresis.
    j.pressure_time_constant = 1e-6;
    j.coulomb_friction = 0.0;
    j.viscous_friction = 0.0;
    j.friction_angle_gain = 0.0;
    j.hysteresis_width = 0.0;
  }
  return p;
}

PlantState PlantState::rest(const PlantModel& plant) {
  const int n = plant.n_joints();
  PlantState s;
  s.agonist_pressure.resize(n);
  s.antagonist_pressure.resize(n);
  s.hysteresis_anchor = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    s.agonist_pressure[i] = 0.5 * plant.joints[i].max_pressure;
    s.antagonist_pressure[i] = 0.5 * plant.joints[i].max_pressure;
  }
  return s;
}

std::pair<Vec, PlantState> plant_torque(const PlantModel& plant,
                                        const JointState& joint_state,
                                        const PlantState& internal,
                                        const Vec& u, double dt) {
  const int n = plant.n_joints();
  if (u.size() != n) throw std::invalid_argument("u has wrong dimension");
  if (joint_state.q.size() != n || joint_state.qdot.size() != n)
    throw std::invalid_argument("joint state has wrong dimension");

  PlantState next = internal;
  Vec tau(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = plant.joints[i];
    const double ui = u[i];
    if (ui < -1.0 || ui > 1.0)
      throw std::invalid_argument("control signal out of [-1, 1] at joint " +
                                  std::to_string(i));

    // Dead-band: the effective command only moves once u leaves the band
    // around the last anchor.
    double anchor = internal.hysteresis_anchor[i];
    const double w = p.hysteresis_width;
    if (ui > anchor + w) anchor = ui - w;
    else if (ui < anchor - w) anchor = ui + w;
    next.hysteresis_anchor[i] = anchor;

    const double p_ag_des = 0.5 * (1.0 - anchor) * p.max_pressure;
    const double p_ant_des = 0.5 * (1.0 + anchor) * p.max_pressure;

    // Exact first-order lag over one dt.
    const double alpha = 1.0 - std::exp(-dt / p.pressure_time_constant);
    double p_ag = internal.agonist_pressure[i] +
                  alpha * (p_ag_des - internal.agonist_pressure[i]);
    double p_ant = internal.antagonist_pressure[i] +
                   alpha * (p_ant_des - internal.antagonist_pressure[i]);
    p_ag = std::clamp(p_ag, 0.0, p.max_pressure);
    p_ant = std::clamp(p_ant, 0.0, p.max_pressure);
    next.agonist_pressure[i] = p_ag;
    next.antagonist_pressure[i] = p_ant;

    const double q = joint_state.q[i];
    const double qd = joint_state.qdot[i];
    const double shape = 1.0 + p.shape_c1 * q + p.shape_c2 * q * q +
                         p.shape_c3 * q * q * q;
    const double coulomb = p.coulomb_friction *
                           (1.0 + p.friction_angle_gain * std::abs(q)) *
                           std::tanh(qd / kFrictionVelocityScale);
    const double friction = coulomb + p.viscous_friction * qd;
    tau[i] = p.force_gain * (p_ag - p_ant) * shape - friction;
  }
  return {tau, next};
}

Trajectory plant_rollout(const PlantModel& plant, const ArmModel& arm,
                         const JointState& init,
                         const std::vector<Vec>& controls,
                         PlantState internal) {
  const int n = arm.n_joints;
  if (plant.n_joints() != n)
    throw std::invalid_argument("plant/arm joint count mismatch");

  Trajectory traj;
  traj.dt = arm.dt;
  const std::size_t steps = controls.size();
  traj.t.reserve(steps + 1);
  traj.q.reserve(steps + 1);
  traj.u.reserve(steps + 1);

  JointState state = init;
  for (std::size_t k = 0; k < steps; ++k) {
    traj.t.push_back(static_cast<double>(k) * arm.dt);
    traj.q.push_back(state.q);
    traj.u.push_back(controls[k]);

    auto [tau, next_internal] = plant_torque(plant, state, internal, controls[k], arm.dt);
    internal = std::move(next_internal);
    state = step(arm, state, tau);

    for (int j = 0; j < n; ++j) {
      const auto& lim = arm.joint_limits[j];
      if (state.q[j] < lim.lo) {
        state.q[j] = lim.lo;
        state.qdot[j] = 0.0;
      } else if (state.q[j] > lim.hi) {
        state.q[j] = lim.hi;
        state.qdot[j] = 0.0;
      }
    }
    if (!state.q.allFinite() || !state.qdot.allFinite()) {
      throw std::runtime_error("plant rollout diverged at step " +
                               std::to_string(k + 1));
    }
  }
  traj.t.push_back(static_cast<double>(steps) * arm.dt);
  traj.q.push_back(state.q);
  traj.u.push_back(steps > 0 ? controls.back() : Vec(Vec::Zero(n)));
  return traj;
}

}  // namespace gean
