#pragma once

// Sphere-approximation collision world. Margins are differentiable functions
// of the joint positions (templated scalar), nonpositive exactly when a
// constraint is violated.

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "spectraj/dynamics.hpp"
#include "spectraj/robot.hpp"

namespace spectraj {

struct RobotSphere {
  int link = 0;                 // link index the sphere is attached to
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // center in link frame
  double radius = 0.0;
};

struct ObstacleSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // world frame
  double radius = 0.0;
};

struct WorkspaceBox {
  Eigen::Vector3d lower = Eigen::Vector3d::Zero();
  Eigen::Vector3d upper = Eigen::Vector3d::Zero();
};

struct CollisionWorld {
  std::vector<RobotSphere> robot_spheres;
  std::vector<ObstacleSphere> obstacles;
  std::optional<WorkspaceBox> workspace;
  std::vector<std::pair<int, int>> self_pairs;  // indices into robot_spheres
  // When set, constraint entries use the smooth squared form
  // |c1-c2|^2 - (r1+r2)^2 instead of the signed distance margin.
  bool squared_margins = false;

  void validate(const RobotModel& model) const;
};

// All sphere pairs whose links are neither identical nor parent/child in the
// chain; the scenario file may override this set.
std::vector<std::pair<int, int>> default_self_pairs(const RobotModel& model,
                                                    const std::vector<RobotSphere>& spheres);

// Entries in the vector returned by collision_constraint_values, in order:
// |self_pairs| sphere-sphere margins, then robot x obstacle margins (robot
// sphere major), then 6 box margins per robot sphere (lower x,y,z then upper
// x,y,z) when the workspace box is present.
int collision_constraint_count(const CollisionWorld& world);

// Signed separation between two spheres; >= 0 iff they do not overlap.
template <typename T>
T pair_margin(const Vec3<T>& c1, double r1, const Vec3<T>& c2, double r2) {
  using std::sqrt;
  return sqrt(T((c1 - c2).squaredNorm())) - (r1 + r2);
}

template <typename T>
std::vector<Vec3<T>> robot_sphere_centers(const RobotModel& model, const CollisionWorld& world,
                                          const VecX<T>& q) {
  const auto poses = forward_kinematics(model, q);
  std::vector<Vec3<T>> centers;
  centers.reserve(world.robot_spheres.size());
  for (const RobotSphere& sphere : world.robot_spheres) {
    if (sphere.link < 0 || sphere.link >= model.dof())
      throw std::invalid_argument("robot sphere references a nonexistent link");
    const FramePose<T>& pose = poses[sphere.link];
    centers.push_back(pose.position + pose.rotation * Vec3<T>(sphere.offset.cast<T>()));
  }
  return centers;
}

template <typename T>
VecX<T> collision_constraint_values(const RobotModel& model, const CollisionWorld& world,
                                    const VecX<T>& q) {
  const auto centers = robot_sphere_centers(model, world, q);
  VecX<T> out(collision_constraint_count(world));
  int k = 0;

  auto margin = [&](const Vec3<T>& c1, double r1, const Vec3<T>& c2, double r2) -> T {
    if (world.squared_margins) {
      const double rsum = r1 + r2;
      return (c1 - c2).squaredNorm() - rsum * rsum;
    }
    return pair_margin(c1, r1, c2, r2);
  };

  for (const auto& [a, b] : world.self_pairs)
    out(k++) = margin(centers[a], world.robot_spheres[a].radius, centers[b],
                      world.robot_spheres[b].radius);

  for (std::size_t j = 0; j < centers.size(); ++j)
    for (const ObstacleSphere& obs : world.obstacles)
      out(k++) = margin(centers[j], world.robot_spheres[j].radius,
                        Vec3<T>(obs.center.cast<T>()), obs.radius);

  if (world.workspace) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double r = world.robot_spheres[j].radius;
      for (int axis = 0; axis < 3; ++axis)
        out(k++) = centers[j](axis) - r - world.workspace->lower(axis);
      for (int axis = 0; axis < 3; ++axis)
        out(k++) = world.workspace->upper(axis) - centers[j](axis) - r;
    }
  }
  return out;
}

}  // namespace spectraj
