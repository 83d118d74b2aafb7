#pragma once

#include <Eigen/Core>
#include <vector>

namespace spectraj {

// One revolute joint plus the rigid link it drives. The link frame sits at
// the joint: world pose = parent pose * fixed origin transform * rotation
// about `axis` by q. Inertial quantities are expressed in the link frame,
// inertia about the center of mass.
struct Link {
  int parent = -1;  // index of parent link; -1 roots the chain at the fixed base
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  Eigen::Matrix3d origin_rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // unit revolute axis, link frame
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();  // about com, link frame
  double gear_ratio = 1.0;
  double viscous_friction = 0.0;  // N*m*s/rad
  double coulomb_friction = 0.0;  // N*m
};

// Serial-chain (tree) robot with actuator limits. Velocity, torque, and
// torque-rate limits are symmetric and stored as positive magnitudes.
struct RobotModel {
  std::vector<Link> links;
  Eigen::VectorXd q_min, q_max;
  Eigen::VectorXd qd_max;
  Eigen::VectorXd tau_max;
  Eigen::VectorXd taud_max;
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);
  double friction_smoothing = 0.01;  // tanh width for Coulomb term [rad/s]

  int dof() const { return static_cast<int>(links.size()); }

  // Throws std::invalid_argument on any violated structural invariant:
  // parents must precede children, masses positive, inertias symmetric
  // positive definite, axes unit, limits ordered and positive.
  void validate() const;
};

}  // namespace spectraj
