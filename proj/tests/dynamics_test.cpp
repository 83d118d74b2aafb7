#include "spectraj/dynamics.hpp"

#include <gtest/gtest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "spectraj/templates.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

namespace {

using spectraj::RobotModel;

Eigen::VectorXd random_vector(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

TEST(ForwardKinematicsTest, TwoLinkTipPositions) {
  const RobotModel model = spectraj::two_link_robot().model;
  {
    Eigen::Vector2d q(0.0, 0.0);
    const auto poses = spectraj::forward_kinematics<double>(model, q);
    EXPECT_LT((poses[1].position - Eigen::Vector3d(0.5, 0.0, 0.0)).norm(), 1e-14);
  }
  {
    // Shoulder at +90 degrees swings the arm down through -z.
    Eigen::Vector2d q(M_PI / 2.0, 0.0);
    const auto poses = spectraj::forward_kinematics<double>(model, q);
    EXPECT_LT((poses[1].position - Eigen::Vector3d(0.0, 0.0, -0.5)).norm(), 1e-14);
  }
  {
    // Elbow folded back by -90 degrees: second link points along +z from the
    // elbow when the shoulder is level.
    Eigen::Vector2d q(0.0, -M_PI / 2.0);
    const auto poses = spectraj::forward_kinematics<double>(model, q);
    const Eigen::Vector3d elbow_x = poses[1].rotation.col(0);
    EXPECT_LT((elbow_x - Eigen::Vector3d(0.0, 0.0, 1.0)).norm(), 1e-14);
  }
}

TEST(FrictionTest, ViscousPlusSmoothCoulomb) {
  const RobotModel model = spectraj::two_link_robot().model;
  Eigen::Vector2d qd(0.8, -1.7);
  const Eigen::VectorXd f = spectraj::friction_torque<double>(model, qd);
  for (int k = 0; k < 2; ++k) {
    const auto& link = model.links[k];
    EXPECT_DOUBLE_EQ(f(k), link.viscous_friction * qd(k) +
                               link.coulomb_friction * std::tanh(qd(k) / 0.01));
  }
  // Odd in qd.
  const Eigen::VectorXd g = spectraj::friction_torque<double>(model, Eigen::VectorXd(-qd));
  EXPECT_LT((f + g).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InverseDynamicsTest, StaticTorqueIsGravityTerm) {
  const RobotModel model = spectraj::two_link_robot().model;
  const oracles::PlanarArmParams params = oracles::two_link_params();
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  for (const Eigen::Vector2d& q :
       {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.7, -0.3), Eigen::Vector2d(-1.2, 2.1)}) {
    const Eigen::VectorXd tau = spectraj::inverse_dynamics<double>(model, q, zero, zero);
    const Eigen::Vector2d expected = oracles::planar_bias(params, q, zero);
    EXPECT_LT((tau - expected).cwiseAbs().maxCoeff(), 1e-11) << "q = " << q.transpose();
  }
}

TEST(InverseDynamicsTest, MatchesLagrangianOracleOnRandomStates) {
  const RobotModel model = spectraj::two_link_robot().model;
  const oracles::PlanarArmParams params = oracles::two_link_params();
  std::mt19937 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector2d q = random_vector(rng, 2, 2.9);
    const Eigen::Vector2d qd = random_vector(rng, 2, 3.0);
    const Eigen::Vector2d qdd = random_vector(rng, 2, 6.0);
    const Eigen::VectorXd tau = spectraj::inverse_dynamics<double>(model, q, qd, qdd);
    const Eigen::Vector2d expected = oracles::planar_torque(params, q, qd, qdd);
    EXPECT_LT((tau - expected).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
  }
}

TEST(InverseDynamicsTest, PendulumClosedForm) {
  const RobotModel model = testmodels::pendulum();
  const double m = 1.4, lc = 0.3, iyy = 0.05, g = 9.81;
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double q = random_vector(rng, 1, 3.0)(0);
    const double qd = random_vector(rng, 1, 4.0)(0);
    const double qdd = random_vector(rng, 1, 8.0)(0);
    const Eigen::VectorXd tau = spectraj::inverse_dynamics<double>(
        model, Eigen::VectorXd::Constant(1, q), Eigen::VectorXd::Constant(1, qd),
        Eigen::VectorXd::Constant(1, qdd));
    const double expected = (iyy + m * lc * lc) * qdd - m * g * lc * std::cos(q);
    EXPECT_NEAR(tau(0), expected, 1e-11) << "trial " << trial;
  }
}

TEST(RoundTripTest, ForwardInverseConsistency) {
  std::mt19937 rng(77);
  const RobotModel models[] = {testmodels::pendulum(), spectraj::two_link_robot().model,
                               spectraj::six_axis_robot().model};
  for (const RobotModel& model : models) {
    const int n = model.dof();
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::VectorXd q = random_vector(rng, n, 1.5);
      const Eigen::VectorXd qd = random_vector(rng, n, 2.0);
      const Eigen::VectorXd qdd = random_vector(rng, n, 5.0);
      const Eigen::VectorXd tau = spectraj::inverse_dynamics<double>(model, q, qd, qdd);
      const Eigen::VectorXd back = spectraj::forward_dynamics<double>(model, q, qd, tau);
      EXPECT_LT((back - qdd).cwiseAbs().maxCoeff(), 1e-9)
          << "dof " << n << " trial " << trial;
    }
  }
}

TEST(RoundTripTest, MassMatrixFromInverseDynamicsIsOracle) {
  const RobotModel model = spectraj::two_link_robot().model;
  const oracles::PlanarArmParams params = oracles::two_link_params();
  const Eigen::Vector2d q(0.6, -1.1);
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  const Eigen::VectorXd bias = spectraj::inverse_dynamics<double>(model, q, zero, zero);
  Eigen::Matrix2d m;
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd col =
        spectraj::inverse_dynamics<double>(model, q, zero, Eigen::Vector2d::Unit(j));
    m.col(j) = col - bias;
  }
  EXPECT_LT((m - oracles::planar_mass_matrix(params, q)).cwiseAbs().maxCoeff(), 1e-11);
  // Symmetric positive definite at this configuration.
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_GT(m.determinant(), 0.0);
  EXPECT_GT(m(0, 0), 0.0);
}

TEST(EnergyTest, PassiveFrictionlessSwingConservesEnergy) {
  RobotModel model = spectraj::two_link_robot().model;
  for (auto& link : model.links) {
    link.viscous_friction = 0.0;
    link.coulomb_friction = 0.0;
  }
  const oracles::PlanarArmParams base = oracles::two_link_params();
  oracles::PlanarArmParams params = base;
  params.viscous.setZero();
  params.coulomb.setZero();

  oracles::SimState state;
  state.q = Eigen::Vector2d(0.4, 0.9);
  state.qd = Eigen::Vector2d(0.0, 0.0);
  const double e0 = oracles::planar_energy(params, state.q, state.qd);

  auto no_torque = [](double) { return Eigen::VectorXd::Zero(2).eval(); };
  const oracles::SimState final_state = oracles::rk4_simulate(model, state, no_torque, 2.0, 4000);
  const double e1 = oracles::planar_energy(params, final_state.q, final_state.qd);
  EXPECT_NEAR(e1, e0, 1e-7);
}

TEST(StateDerivativeTest, StacksVelocityAndAcceleration) {
  const RobotModel model = spectraj::two_link_robot().model;
  Eigen::VectorXd x(4);
  x << 0.3, -0.2, 1.0, -0.5;
  Eigen::Vector2d u(4.0, -2.0);
  const Eigen::VectorXd dx = spectraj::state_derivative<double>(model, x, u);
  EXPECT_DOUBLE_EQ(dx(0), 1.0);
  EXPECT_DOUBLE_EQ(dx(1), -0.5);
  const Eigen::VectorXd qdd =
      spectraj::forward_dynamics<double>(model, x.head(2), x.tail(2), u);
  EXPECT_DOUBLE_EQ(dx(2), qdd(0));
  EXPECT_DOUBLE_EQ(dx(3), qdd(1));
}

TEST(ValidationTest, DimensionAndFinitenessChecks) {
  const RobotModel model = spectraj::two_link_robot().model;
  const Eigen::Vector2d ok = Eigen::Vector2d::Zero();
  const Eigen::Vector3d wrong = Eigen::Vector3d::Zero();
  EXPECT_THROW(spectraj::inverse_dynamics<double>(model, wrong, ok, ok), std::invalid_argument);
  EXPECT_THROW(spectraj::forward_dynamics<double>(model, ok, wrong, ok), std::invalid_argument);

  Eigen::Vector2d nan = ok;
  nan(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(spectraj::forward_dynamics<double>(model, ok, nan, ok), std::invalid_argument);
}

TEST(ValidationTest, ModelInvariantsEnforced) {
  RobotModel model = spectraj::two_link_robot().model;
  model.links[1].parent = 5;
  EXPECT_THROW(model.validate(), std::invalid_argument);

  model = spectraj::two_link_robot().model;
  model.links[0].mass = -1.0;
  EXPECT_THROW(model.validate(), std::invalid_argument);

  model = spectraj::two_link_robot().model;
  model.links[0].axis = Eigen::Vector3d(1.0, 1.0, 0.0);  // not unit
  EXPECT_THROW(model.validate(), std::invalid_argument);

  model = spectraj::two_link_robot().model;
  model.q_min(0) = model.q_max(0) + 1.0;
  EXPECT_THROW(model.validate(), std::invalid_argument);
}

}  // namespace
