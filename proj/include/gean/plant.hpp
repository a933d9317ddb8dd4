// The synthetic "real robot": antagonistic muscle pairs with pressure
// lag, a hysteresis dead-band on the commanded pressures, nonlinear
// torque shaping, and configuration-dependent friction. The learner
// only ever sees (t, q, u) logs of this plant.
#pragma once

#include <utility>

#include "gean/dynamics.hpp"
#include "gean/trajectory.hpp"

namespace gean {

struct PlantJointParams {
  double pressure_time_constant = 0.05;  // [s]
  double max_pressure = 1.0;             // normalized
  double force_gain = 10.0;              // [N m] per unit pressure difference
  // Torque shaping vs joint angle: shape(q) = 1 + c1 q + c2 q^2 + c3 q^3.
  double shape_c1 = 0.0;
  double shape_c2 = 0.0;
  double shape_c3 = 0.0;
  double coulomb_friction = 0.0;     // [N m]
  double viscous_friction = 0.0;     // [N m s/rad]
  double friction_angle_gain = 0.0;  // scales Coulomb by 1 + gain*|q|
  double hysteresis_width = 0.0;     // dead-band on commanded pressure
};

struct PlantModel {
  std::vector<PlantJointParams> joints;

  int n_joints() const { return static_cast<int>(joints.size()); }
  void validate() const;

  // The documented reproducible preset with all pathologies enabled.
  static PlantModel default_messy(int n = 4);
  // All mess parameters off: an invertible static torque map, used as an
  // easy-mode fixture for learner sanity tests.
  static PlantModel easy(int n = 4);
};

struct PlantState {
  Vec agonist_pressure;
  Vec antagonist_pressure;
  Vec hysteresis_anchor;  // last command that moved the dead-band

  static PlantState rest(const PlantModel& plant);
};

// Velocity scale of the tanh-smoothed Coulomb friction [rad/s].
inline constexpr double kFrictionVelocityScale = 0.05;

// One control step: desired pressures move antagonistically with u
// (increasing u decreases the agonist and increases the antagonist
// pressure), actual pressures follow a first-order lag through the
// hysteresis dead-band, and the output torque is
//   tau = force_gain * (p_ag - p_ant) * shape(q) - friction(q, qdot).
std::pair<Vec, PlantState> plant_torque(const PlantModel& plant,
                                        const JointState& joint_state,
                                        const PlantState& internal,
                                        const Vec& u, double dt);

// Alternates plant_torque and dynamics::step, logging (t, q, u) at every
// dt. Joint limits are enforced by clamping q and zeroing the velocity at
// the limit. Throws on non-finite state, identifying the step index.
Trajectory plant_rollout(const PlantModel& plant, const ArmModel& arm,
                         const JointState& init,
                         const std::vector<Vec>& controls,
                         PlantState internal);

}  // namespace gean
