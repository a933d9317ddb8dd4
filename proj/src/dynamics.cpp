#include "gean/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gean {

namespace {

void check_dim(const ArmModel& model, const Vec& v, const char* name) {
  if (v.size() != model.n_joints) {
    throw std::invalid_argument(std::string(name) + " has dimension " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(model.n_joints));
  }
}

// Absolute link angles theta_i = sum_{k<=i} q_k.
Vec absolute_angles(const Vec& q) {
  Vec theta(q.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    acc += q[i];
    theta[i] = acc;
  }
  return theta;
}

// Reverse cumulative sum, i.e., S^T x for the lower-triangular ones matrix S.
Vec reverse_cumsum(const Vec& x) {
  Vec out(x.size());
  double acc = 0.0;
  for (Eigen::Index i = x.size() - 1; i >= 0; --i) {
    acc += x[i];
    out[i] = acc;
  }
  return out;
}

// a_{ik}: lever of absolute angle k in the COM position of link i.
double lever(const ArmModel& m, int i, int k) {
  return k < i ? m.link_length[k] : m.com_offset[i];
}

// b_{kl} = sum_{i >= max(k,l)} m_i a_{ik} a_{il}; constant per model.
Mat lever_products(const ArmModel& m) {
  const int n = m.n_joints;
  Mat b = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      double s = 0.0;
      for (int i = l; i < n; ++i) s += m.mass[i] * lever(m, i, k) * lever(m, i, l);
      b(k, l) = s;
      b(l, k) = s;
    }
  }
  return b;
}

// Mass matrix in absolute-angle coordinates.
Mat abs_mass_matrix(const ArmModel& m, const Vec& theta) {
  const int n = m.n_joints;
  const Mat b = lever_products(m);
  Mat a(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      a(k, l) = b(k, l) * std::cos(theta[k] - theta[l]);
    }
    a(k, k) += m.inertia_zz[k];
  }
  return a;
}

}  // namespace

ArmModel ArmModel::default_arm(int n) {
  ArmModel m;
  m.n_joints = n;
  m.link_length.resize(n);
  m.com_offset.resize(n);
  m.mass.resize(n);
  m.inertia_zz.resize(n);
  for (int i = 0; i < n; ++i) {
    const double len = 0.35 - 0.05 * std::min(i, 4);
    m.link_length[i] = len;
    m.com_offset[i] = 0.5 * len;
    m.mass[i] = std::max(0.2, 1.2 - 0.3 * i);
    m.inertia_zz[i] = m.mass[i] * len * len / 12.0;
  }
  m.gravity = 9.81;
  m.dt = 0.002;
  const double d = M_PI / 180.0;
  if (n == 4) {
    m.joint_limits = {{-68 * d, 68 * d},
                      {-56 * d, 64 * d},
                      {-64 * d, 64 * d},
                      {-64 * d, 64 * d}};
  } else {
    m.joint_limits.assign(n, {-90 * d, 90 * d});
  }
  m.validate();
  return m;
}

void ArmModel::validate() const {
  if (n_joints < 1) throw std::invalid_argument("n_joints must be >= 1");
  auto need = [&](const Vec& v, const char* name) {
    if (v.size() != n_joints)
      throw std::invalid_argument(std::string(name) + " has wrong size");
  };
  need(link_length, "link_length");
  need(com_offset, "com_offset");
  need(mass, "mass");
  need(inertia_zz, "inertia_zz");
  if ((mass.array() <= 0).any()) throw std::invalid_argument("masses must be > 0");
  if ((link_length.array() <= 0).any())
    throw std::invalid_argument("link lengths must be > 0");
  if ((inertia_zz.array() < 0).any())
    throw std::invalid_argument("inertia_zz must be >= 0");
  if (dt <= 0) throw std::invalid_argument("dt must be > 0");
  if (joint_limits.size() != static_cast<size_t>(n_joints))
    throw std::invalid_argument("joint_limits has wrong size");
  for (const auto& lim : joint_limits) {
    if (!(lim.lo < lim.hi)) throw std::invalid_argument("joint limit lo >= hi");
  }
}

Mat mass_matrix(const ArmModel& model, const Vec& q) {
  check_dim(model, q, "q");
  const int n = model.n_joints;
  const Vec theta = absolute_angles(q);
  const Mat a = abs_mass_matrix(model, theta);
  // M = S^T A S with S the lower-triangular ones matrix:
  // M_ij = sum_{k>=i, l>=j} A_kl.
  Mat m(n, n);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = n - 1; j >= 0; --j) {
      double v = a(i, j);
      if (i + 1 < n) v += m(i + 1, j);
      if (j + 1 < n) v += m(i, j + 1);
      if (i + 1 < n && j + 1 < n) v -= m(i + 1, j + 1);
      m(i, j) = v;
    }
  }
  return m;
}

Vec gravity_torque(const ArmModel& model, const Vec& q) {
  check_dim(model, q, "q");
  const int n = model.n_joints;
  const Vec theta = absolute_angles(q);
  Vec gtheta(n);
  for (int k = 0; k < n; ++k) {
    double w = 0.0;
    for (int i = k; i < n; ++i) w += model.mass[i] * lever(model, i, k);
    gtheta[k] = model.gravity * w * std::sin(theta[k]);
  }
  return reverse_cumsum(gtheta);
}

Vec coriolis_gravity(const ArmModel& model, const Vec& q, const Vec& qdot) {
  check_dim(model, q, "q");
  check_dim(model, qdot, "qdot");
  const int n = model.n_joints;
  const Vec theta = absolute_angles(q);
  const Vec thetadot = absolute_angles(qdot);
  const Mat b = lever_products(model);
  Vec ctheta = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      ctheta[k] += b(k, l) * std::sin(theta[k] - theta[l]) * thetadot[l] * thetadot[l];
    }
  }
  return reverse_cumsum(ctheta) + gravity_torque(model, q);
}

Vec inverse_dynamics(const ArmModel& model, const Vec& q, const Vec& qdot,
                     const Vec& qddot) {
  check_dim(model, qddot, "qddot");
  return mass_matrix(model, q) * qddot + coriolis_gravity(model, q, qdot);
}

Vec forward_dynamics(const ArmModel& model, const Vec& q, const Vec& qdot,
                     const Vec& tau) {
  check_dim(model, tau, "tau");
  const Mat m = mass_matrix(model, q);
  const Vec rhs = tau - coriolis_gravity(model, q, qdot);
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("forward_dynamics: mass matrix is not SPD");
  }
  return llt.solve(rhs);
}

JointState step(const ArmModel& model, const JointState& state, const Vec& tau) {
  const Vec qddot = forward_dynamics(model, state.q, state.qdot, tau);
  JointState next;
  next.qdot = state.qdot + model.dt * qddot;
  next.q = state.q + model.dt * next.qdot;
  return next;
}

double total_energy(const ArmModel& model, const JointState& state) {
  const Vec theta = absolute_angles(state.q);
  const Vec thetadot = absolute_angles(state.qdot);
  const Mat a = abs_mass_matrix(model, theta);
  const double kinetic = 0.5 * thetadot.dot(a * thetadot);
  double potential = 0.0;
  const int n = model.n_joints;
  for (int k = 0; k < n; ++k) {
    double w = 0.0;
    for (int i = k; i < n; ++i) w += model.mass[i] * lever(model, i, k);
    potential += model.gravity * w * (1.0 - std::cos(theta[k]));
  }
  return kinetic + potential;
}

}  // namespace gean
