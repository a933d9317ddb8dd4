// Analytic rigid-body dynamics of a planar n-link serial arm with
// revolute joints. Joint angles are relative; angle zero is the hanging
// rest configuration, gravity acts in-plane.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gean {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct JointLimit {
  double lo;
  double hi;
};

struct ArmModel {
  int n_joints = 0;
  Vec link_length;   // [m]
  Vec com_offset;    // distance joint -> COM along the link [m]
  Vec mass;          // [kg]
  Vec inertia_zz;    // about COM, out-of-plane axis [kg m^2]
  double gravity = 9.81;  // [m/s^2], in-plane
  double dt = 0.002;      // simulator step [s]
  std::vector<JointLimit> joint_limits;

  // Default desk-scale arm: tapered 4-link chain (or a generic taper for
  // other n) with rod inertias and the reacher joint limits.
  static ArmModel default_arm(int n = 4);

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct JointState {
  Vec q;     // [rad]
  Vec qdot;  // [rad/s]
};

// M(q), symmetric positive definite.
Mat mass_matrix(const ArmModel& model, const Vec& q);

// g(q) alone.
Vec gravity_torque(const ArmModel& model, const Vec& q);

// c(q, qdot) + g(q).
Vec coriolis_gravity(const ArmModel& model, const Vec& q, const Vec& qdot);

// tau = M(q) qddot + c(q, qdot) + g(q)
Vec inverse_dynamics(const ArmModel& model, const Vec& q, const Vec& qdot,
                     const Vec& qddot);

// qddot = M(q)^-1 (tau - c - g), via an SPD (LLT) solve.
Vec forward_dynamics(const ArmModel& model, const Vec& q, const Vec& qdot,
                     const Vec& tau);

// One symplectic Euler step: velocity first, then position with the new
// velocity.
JointState step(const ArmModel& model, const JointState& state,
                const Vec& tau);

// Kinetic + potential energy, zero potential at the hanging rest pose.
double total_energy(const ArmModel& model, const JointState& state);

}  // namespace gean
