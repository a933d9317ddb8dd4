#include "gean/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gean;

namespace {

// Independent closed-form double-pendulum oracle (textbook Lagrangian in
// absolute link angles, converted to relative joint coordinates). Written
// from the standard equations, not from the library's n-link recursion.
struct PendulumOracle {
  double l1, a1, a2, m1, m2, i1, i2, g;

  static PendulumOracle from(const ArmModel& arm) {
    return {arm.link_length[0], arm.com_offset[0], arm.com_offset[1],
            arm.mass[0],        arm.mass[1],       arm.inertia_zz[0],
            arm.inertia_zz[1],  arm.gravity};
  }

  // Mass matrix in relative coordinates q = (q1, q2), theta = (q1, q1+q2).
  Mat mass(const Vec& q) const {
    const double c12 = std::cos(-q[1]);  // cos(theta1 - theta2)
    const double a11 = m1 * a1 * a1 + i1 + m2 * l1 * l1;
    const double a12 = m2 * l1 * a2 * c12;
    const double a22 = m2 * a2 * a2 + i2;
    Mat a(2, 2);
    a << a11, a12, a12, a22;
    Mat s(2, 2);
    s << 1, 0, 1, 1;
    return s.transpose() * a * s;
  }

  Vec bias(const Vec& q, const Vec& qd) const {
    const double th1 = q[0], th2 = q[0] + q[1];
    const double td1 = qd[0], td2 = qd[0] + qd[1];
    const double s12 = std::sin(th1 - th2);
    Vec c_theta(2), g_theta(2);
    c_theta << m2 * l1 * a2 * s12 * td2 * td2,
        -m2 * l1 * a2 * s12 * td1 * td1;
    g_theta << g * std::sin(th1) * (m1 * a1 + m2 * l1),
        g * m2 * a2 * std::sin(th2);
    Mat s(2, 2);
    s << 1, 0, 1, 1;
    return s.transpose() * (c_theta + g_theta);
  }

  Vec accel(const Vec& q, const Vec& qd, const Vec& tau) const {
    return mass(q).ldlt().solve(tau - bias(q, qd));
  }
};

ArmModel two_link() {
  ArmModel arm = ArmModel::default_arm(2);
  return arm;
}

Vec random_vec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

TEST_CASE("two-link dynamics match the closed-form pendulum oracle") {
  const ArmModel arm = two_link();
  const PendulumOracle oracle = PendulumOracle::from(arm);
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec q = random_vec(rng, 2, 3.0);
    const Vec qd = random_vec(rng, 2, 5.0);
    const Vec tau = random_vec(rng, 2, 10.0);
    CHECK((mass_matrix(arm, q) - oracle.mass(q)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((coriolis_gravity(arm, q, qd) - oracle.bias(q, qd))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK((forward_dynamics(arm, q, qd, tau) - oracle.accel(q, qd, tau))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }
}

TEST_CASE("single pendulum has textbook mass and gravity terms") {
  const ArmModel arm = ArmModel::default_arm(1);
  const double m = arm.mass[0], a = arm.com_offset[0], i = arm.inertia_zz[0];
  Vec q(1);
  q << 0.7;
  CHECK(mass_matrix(arm, q)(0, 0) == doctest::Approx(m * a * a + i).epsilon(1e-12));
  CHECK(gravity_torque(arm, q)[0] ==
        doctest::Approx(m * arm.gravity * a * std::sin(0.7)).epsilon(1e-12));
  // Zero angle is the hanging rest configuration: no gravity torque.
  q << 0.0;
  CHECK(gravity_torque(arm, q)[0] == doctest::Approx(0.0));
}

TEST_CASE("mass matrix is symmetric positive definite") {
  const ArmModel arm = ArmModel::default_arm(4);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec q = random_vec(rng, 4, 3.0);
    const Mat m = mass_matrix(arm, q);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Mat> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("inverse and forward dynamics are mutual inverses") {
  const ArmModel arm = ArmModel::default_arm(4);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec q = random_vec(rng, 4, 3.0);
    const Vec qd = random_vec(rng, 4, 5.0);
    const Vec qdd = random_vec(rng, 4, 20.0);
    const Vec tau = inverse_dynamics(arm, q, qd, qdd);
    CHECK((forward_dynamics(arm, q, qd, tau) - qdd).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("step is velocity-first symplectic Euler") {
  const ArmModel arm = ArmModel::default_arm(3);
  std::mt19937_64 rng(3);
  const JointState st{random_vec(rng, 3, 2.0), random_vec(rng, 3, 3.0)};
  const Vec tau = random_vec(rng, 3, 5.0);
  const Vec qdd = forward_dynamics(arm, st.q, st.qdot, tau);
  const JointState next = step(arm, st, tau);
  const Vec qdot_expect = st.qdot + arm.dt * qdd;
  CHECK((next.qdot - qdot_expect).cwiseAbs().maxCoeff() == 0.0);
  // Position advances with the *new* velocity.
  CHECK((next.q - (st.q + arm.dt * qdot_expect)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("passive swing approximately conserves energy") {
  const ArmModel arm = ArmModel::default_arm(2);
  JointState st{Vec(2), Vec::Zero(2)};
  st.q << 0.9, -0.4;
  const double e0 = total_energy(arm, st);
  const Vec zero = Vec::Zero(2);
  double max_drift = 0.0;
  for (int k = 0; k < 5000; ++k) {
    st = step(arm, st, zero);
    max_drift = std::max(max_drift, std::abs(total_energy(arm, st) - e0));
  }
  // Symplectic Euler keeps the energy error bounded, not zero.
  CHECK(max_drift < 0.05 * std::abs(e0) + 0.05);
}

TEST_CASE("model validation rejects broken arms") {
  ArmModel arm = ArmModel::default_arm(2);
  CHECK_NOTHROW(arm.validate());
  arm.mass[0] = -1.0;
  CHECK_THROWS_AS(arm.validate(), std::invalid_argument);
  arm = ArmModel::default_arm(2);
  arm.dt = 0.0;
  CHECK_THROWS_AS(arm.validate(), std::invalid_argument);
  arm = ArmModel::default_arm(2);
  arm.link_length = Vec::Ones(3);
  CHECK_THROWS_AS(arm.validate(), std::invalid_argument);
}
