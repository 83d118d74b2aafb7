#pragma once

// Shipped robot/scenario templates. The two-link planar arm has fully
// specified dynamics; the six-axis arm carries the published actuator limits
// with placeholder inertial values flagged in its notes field.

#include <string>

#include "spectraj/config.hpp"

namespace spectraj {

// JSON documents exactly as emitted by the command-line template command.
std::string two_link_robot_json();
std::string two_link_scenario_json();
std::string six_axis_robot_json();
std::string six_axis_scenario_json();

// Parsed counterparts of the documents above.
RobotConfig two_link_robot();
ScenarioConfig two_link_scenario();
RobotConfig six_axis_robot();
ScenarioConfig six_axis_scenario();

}  // namespace spectraj
