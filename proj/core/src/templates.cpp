#include "spectraj/templates.hpp"

namespace spectraj {

// Planar arm moving in the x-z plane: both joints rotate about +y, gravity
// acts along -z. Slender-rod inertias about each center of mass.
std::string two_link_robot_json() {
  return R"({
  "name": "two-link-planar",
  "angle_unit": "rad",
  "gravity": [0.0, 0.0, -9.81],
  "friction_smoothing": 0.01,
  "joints": [
    {
      "name": "shoulder",
      "parent": -1,
      "origin": {"xyz": [0.0, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 1.0, 0.0],
      "mass": 3.0,
      "com": [0.25, 0.0, 0.0],
      "inertia": [0.002, 0.08, 0.08, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 0.4, "coulomb": 0.2}
    },
    {
      "name": "elbow",
      "parent": 0,
      "origin": {"xyz": [0.5, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 1.0, 0.0],
      "mass": 2.0,
      "com": [0.2, 0.0, 0.0],
      "inertia": [0.001, 0.04, 0.04, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 0.25, "coulomb": 0.1}
    }
  ],
  "limits": {
    "q_min": [-2.9, -2.9],
    "q_max": [2.9, 2.9],
    "qd_max": [3.5, 4.5],
    "tau_max": [60.0, 30.0],
    "taud_max": [300.0, 200.0]
  },
  "spheres": [
    {"link": 0, "offset": [0.125, 0.0, 0.0], "radius": 0.1},
    {"link": 0, "offset": [0.375, 0.0, 0.0], "radius": 0.1},
    {"link": 1, "offset": [0.1, 0.0, 0.0], "radius": 0.08},
    {"link": 1, "offset": [0.3, 0.0, 0.0], "radius": 0.08},
    {"link": 1, "offset": [0.4, 0.0, 0.0], "radius": 0.07}
  ]
}
)";
}

std::string two_link_scenario_json() {
  return R"({
  "name": "two-link-demo",
  "angle_unit": "rad",
  "q_start": [-1.1, 1.8],
  "q_goal": [0.9, -1.4],
  "tf_min": 0.2,
  "tf_max": 20.0,
  "tf_guess": 10.0,
  "mu": 0.3,
  "knots": 12,
  "accel_bc": true,
  "enforce_torque_rate": true,
  "obstacles": [
    {"center": [0.724, 0.0, 0.362], "radius": 0.12}
  ]
}
)";
}

// Six-axis industrial arm. The limits block holds the published actuator
// data; see the notes field for what is placeholder.
std::string six_axis_robot_json() {
  return R"({
  "name": "six-axis-industrial",
  "notes": "Kinematic layout, masses, centers of mass, inertia tensors and sphere geometry are illustrative placeholders; replace them with identified values before using results quantitatively. The limits block is actuator data.",
  "angle_unit": "deg",
  "gravity": [0.0, 0.0, -9.81],
  "friction_smoothing": 0.01,
  "joints": [
    {
      "name": "J1",
      "parent": -1,
      "origin": {"xyz": [0.0, 0.0, 0.445], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 0.0, 1.0],
      "mass": 60.0,
      "com": [0.08, 0.0, 0.1],
      "inertia": [2.4, 2.4, 1.8, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 8.0, "coulomb": 6.0}
    },
    {
      "name": "J2",
      "parent": 0,
      "origin": {"xyz": [0.15, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 1.0, 0.0],
      "mass": 45.0,
      "com": [0.0, 0.0, 0.35],
      "inertia": [3.2, 3.2, 0.6, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 8.0, "coulomb": 6.0}
    },
    {
      "name": "J3",
      "parent": 1,
      "origin": {"xyz": [0.0, 0.0, 0.7], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 1.0, 0.0],
      "mass": 30.0,
      "com": [0.25, 0.0, 0.05],
      "inertia": [0.5, 1.6, 1.6, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 4.0, "coulomb": 3.0}
    },
    {
      "name": "J4",
      "parent": 2,
      "origin": {"xyz": [0.6, 0.0, 0.115], "rpy": [0.0, 0.0, 0.0]},
      "axis": [1.0, 0.0, 0.0],
      "mass": 12.0,
      "com": [0.1, 0.0, 0.0],
      "inertia": [0.08, 0.3, 0.3, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 1.0, "coulomb": 0.8}
    },
    {
      "name": "J5",
      "parent": 3,
      "origin": {"xyz": [0.2, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
      "axis": [0.0, 1.0, 0.0],
      "mass": 8.0,
      "com": [0.05, 0.0, 0.0],
      "inertia": [0.05, 0.12, 0.12, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 0.8, "coulomb": 0.6}
    },
    {
      "name": "J6",
      "parent": 4,
      "origin": {"xyz": [0.13, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
      "axis": [1.0, 0.0, 0.0],
      "mass": 3.0,
      "com": [0.03, 0.0, 0.0],
      "inertia": [0.01, 0.02, 0.02, 0.0, 0.0, 0.0],
      "gear_ratio": 1.0,
      "friction": {"viscous": 0.3, "coulomb": 0.2}
    }
  ],
  "limits": {
    "q_min": [-160.0, -90.0, -120.0, -180.0, -120.0, -180.0],
    "q_max": [170.0, 90.0, 230.0, 180.0, 100.0, 180.0],
    "qd_max": [165.0, 165.0, 175.0, 350.0, 340.0, 520.0],
    "tau_max": [1397.0, 1402.0, 383.0, 45.2, 44.6, 32.5],
    "taud_max": [20948.0, 21035.0, 5741.0, 678.0, 669.0, 488.0]
  },
  "spheres": [
    {"link": 0, "offset": [0.05, 0.0, 0.1], "radius": 0.22},
    {"link": 1, "offset": [0.0, 0.0, 0.2], "radius": 0.18},
    {"link": 1, "offset": [0.0, 0.0, 0.5], "radius": 0.18},
    {"link": 2, "offset": [0.2, 0.0, 0.05], "radius": 0.15},
    {"link": 2, "offset": [0.45, 0.0, 0.1], "radius": 0.13},
    {"link": 3, "offset": [0.1, 0.0, 0.0], "radius": 0.11},
    {"link": 4, "offset": [0.06, 0.0, 0.0], "radius": 0.1},
    {"link": 5, "offset": [0.05, 0.0, 0.0], "radius": 0.08}
  ]
}
)";
}

std::string six_axis_scenario_json() {
  return R"({
  "name": "six-axis-demo",
  "angle_unit": "deg",
  "q_start": [0.0, -60.0, 90.0, 0.0, 30.0, 0.0],
  "q_goal": [90.0, -30.0, 120.0, 60.0, -30.0, 90.0],
  "tf_min": 0.2,
  "tf_max": 20.0,
  "tf_guess": 10.0,
  "mu": 0.3,
  "knots": 12,
  "accel_bc": true,
  "enforce_torque_rate": true
}
)";
}

RobotConfig two_link_robot() { return parse_robot_config(two_link_robot_json()); }

ScenarioConfig two_link_scenario() {
  return parse_scenario_config(two_link_scenario_json(), two_link_robot().model);
}

RobotConfig six_axis_robot() { return parse_robot_config(six_axis_robot_json()); }

ScenarioConfig six_axis_scenario() {
  return parse_scenario_config(six_axis_scenario_json(), six_axis_robot().model);
}

}  // namespace spectraj
