#include "spectraj/collision.hpp"

#include <stdexcept>
#include <string>

namespace spectraj {

void CollisionWorld::validate(const RobotModel& model) const {
  for (const RobotSphere& s : robot_spheres) {
    if (s.link < 0 || s.link >= model.dof())
      throw std::invalid_argument("CollisionWorld: robot sphere link index out of range");
    if (!(s.radius > 0.0)) throw std::invalid_argument("CollisionWorld: robot sphere radius must be > 0");
  }
  for (const ObstacleSphere& s : obstacles)
    if (!(s.radius > 0.0)) throw std::invalid_argument("CollisionWorld: obstacle radius must be > 0");
  if (workspace) {
    for (int axis = 0; axis < 3; ++axis)
      if (!(workspace->lower(axis) < workspace->upper(axis)))
        throw std::invalid_argument("CollisionWorld: workspace box must have lower < upper");
  }
  const int m = static_cast<int>(robot_spheres.size());
  for (const auto& [a, b] : self_pairs) {
    if (a < 0 || b < 0 || a >= m || b >= m)
      throw std::invalid_argument("CollisionWorld: self pair sphere index out of range");
    const int la = robot_spheres[a].link, lb = robot_spheres[b].link;
    if (la == lb)
      throw std::invalid_argument("CollisionWorld: self pair on a single link");
    if (model.links[la].parent == lb || model.links[lb].parent == la)
      throw std::invalid_argument("CollisionWorld: self pair on adjacent links");
  }
}

std::vector<std::pair<int, int>> default_self_pairs(const RobotModel& model,
                                                    const std::vector<RobotSphere>& spheres) {
  std::vector<std::pair<int, int>> pairs;
  const int m = static_cast<int>(spheres.size());
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const int la = spheres[a].link, lb = spheres[b].link;
      if (la == lb) continue;
      if (model.links[la].parent == lb || model.links[lb].parent == la) continue;
      pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

int collision_constraint_count(const CollisionWorld& world) {
  const int m = static_cast<int>(world.robot_spheres.size());
  const int s = static_cast<int>(world.obstacles.size());
  return static_cast<int>(world.self_pairs.size()) + m * s + (world.workspace ? 6 * m : 0);
}

}  // namespace spectraj
