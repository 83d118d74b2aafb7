#pragma once

// Strict JSON configuration for robots and scenarios. Unknown fields are
// errors, dimensions are cross-checked, and error messages name the offending
// field. Files may declare angle_unit "deg" or "rad"; everything is radians
// internally.

#include <optional>
#include <string>
#include <vector>

#include "spectraj/collision.hpp"
#include "spectraj/robot.hpp"
#include "spectraj/solver.hpp"
#include "spectraj/transcription.hpp"

namespace spectraj {

struct RobotConfig {
  std::string name;
  RobotModel model;
  // Robot-side collision data: spheres and self pairs; obstacles empty.
  CollisionWorld world;
};

struct ScenarioConfig {
  std::string name;
  Scenario scenario;
  std::vector<ObstacleSphere> obstacles;
  std::optional<WorkspaceBox> workspace;
  bool squared_margins = false;
  SolverOptions solver;
};

RobotConfig parse_robot_config(const std::string& text);
RobotConfig load_robot_config(const std::string& path);
std::string serialize_robot_config(const RobotConfig& config);

// The model fixes the expected dimension and lets errors point at the
// mismatching side.
ScenarioConfig parse_scenario_config(const std::string& text, const RobotModel& model);
ScenarioConfig load_scenario_config(const std::string& path, const RobotModel& model);
std::string serialize_scenario_config(const ScenarioConfig& config);

// Robot-side world plus the scenario's obstacles, workspace box, and margin
// form, ready for Transcription.
CollisionWorld combine_world(const RobotConfig& robot, const ScenarioConfig& scenario);

}  // namespace spectraj
