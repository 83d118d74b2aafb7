#pragma once

// Hand-built miniature robots used across the tests. Kept separate from the
// shipped templates so expectations about them live next to the numbers.

#include <Eigen/Core>

#include "spectraj/robot.hpp"

namespace testmodels {

// Single revolute joint about +y swinging in the x-z plane under -z gravity:
// a gravity pendulum with M = I_yy + m*lc^2 and tau_g = -m*g*lc*cos(q).
inline spectraj::RobotModel pendulum() {
  spectraj::Link link;
  link.parent = -1;
  link.axis = Eigen::Vector3d::UnitY();
  link.mass = 1.4;
  link.com = Eigen::Vector3d(0.3, 0.0, 0.0);
  link.inertia = Eigen::Vector3d(0.01, 0.05, 0.05).asDiagonal();

  spectraj::RobotModel model;
  model.links.push_back(link);
  model.q_min = Eigen::VectorXd::Constant(1, -6.0);
  model.q_max = Eigen::VectorXd::Constant(1, 6.0);
  model.qd_max = Eigen::VectorXd::Constant(1, 20.0);
  model.tau_max = Eigen::VectorXd::Constant(1, 50.0);
  model.taud_max = Eigen::VectorXd::Constant(1, 500.0);
  model.validate();
  return model;
}

// Unit-inertia joint about +z with gravity along -z, so gravity exerts no
// joint torque and the dynamics reduce to qdd = u: a double integrator with
// |u| bounded by the torque limit.
inline spectraj::RobotModel unit_integrator() {
  spectraj::Link link;
  link.parent = -1;
  link.axis = Eigen::Vector3d::UnitZ();
  link.mass = 1.0;
  link.com = Eigen::Vector3d::Zero();
  link.inertia = Eigen::Matrix3d::Identity();

  spectraj::RobotModel model;
  model.links.push_back(link);
  model.q_min = Eigen::VectorXd::Constant(1, -10.0);
  model.q_max = Eigen::VectorXd::Constant(1, 10.0);
  model.qd_max = Eigen::VectorXd::Constant(1, 10.0);
  model.tau_max = Eigen::VectorXd::Constant(1, 1.0);
  model.taud_max = Eigen::VectorXd::Constant(1, 1000.0);
  model.validate();
  return model;
}

}  // namespace testmodels
