#include "spectraj/robot.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace spectraj {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("RobotModel: " + what);
}

}  // namespace

void RobotModel::validate() const {
  const int n = dof();
  require(n >= 1, "at least one joint required");

  for (int i = 0; i < n; ++i) {
    const Link& link = links[i];
    require(link.parent < i, "parent index must precede the link (tree order), joint " + std::to_string(i));
    require(i > 0 || link.parent == -1, "first joint must root at the fixed base");
    require(link.mass > 0.0, "mass must be positive, joint " + std::to_string(i));
    require(std::abs(link.axis.norm() - 1.0) < 1e-9, "axis must be a unit vector, joint " + std::to_string(i));
    require(link.gear_ratio > 0.0, "gear ratio must be positive, joint " + std::to_string(i));
    require(link.viscous_friction >= 0.0 && link.coulomb_friction >= 0.0,
            "friction coefficients must be nonnegative, joint " + std::to_string(i));
    require((link.inertia - link.inertia.transpose()).norm() < 1e-9 * (1.0 + link.inertia.norm()),
            "inertia tensor must be symmetric, joint " + std::to_string(i));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(link.inertia);
    require(eig.eigenvalues().minCoeff() > 0.0,
            "inertia tensor must be positive definite, joint " + std::to_string(i));
    require((link.origin_rot * link.origin_rot.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-9,
            "origin rotation must be orthonormal, joint " + std::to_string(i));
  }

  require(q_min.size() == n && q_max.size() == n && qd_max.size() == n && tau_max.size() == n &&
              taud_max.size() == n,
          "limit arrays must have one entry per joint");
  for (int i = 0; i < n; ++i) {
    require(q_min(i) < q_max(i), "q_min < q_max required, joint " + std::to_string(i));
    require(qd_max(i) > 0.0 && tau_max(i) > 0.0 && taud_max(i) > 0.0,
            "velocity/torque/torque-rate limits must be positive, joint " + std::to_string(i));
  }
  require(friction_smoothing > 0.0, "friction smoothing must be positive");
}

}  // namespace spectraj
