#include "spectraj/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spectraj {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("config error at " + where + ": " + what);
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

void check_keys(const Json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(where, "unknown field '" + item.key() + "'");
  }
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

bool as_bool(const Json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vector(const Json& v, const std::string& where, int expected = -1) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  if (expected >= 0 && static_cast<int>(v.size()) != expected)
    fail(where, "expected " + std::to_string(expected) + " entries, got " +
                    std::to_string(v.size()));
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out(static_cast<int>(i)) = as_number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::Vector3d as_vec3(const Json& v, const std::string& where) {
  return as_vector(v, where, 3);
}

double angle_factor(const Json& obj, const std::string& where) {
  if (!obj.contains("angle_unit")) return 1.0;
  const std::string unit = as_string(obj["angle_unit"], where + ".angle_unit");
  if (unit == "rad") return 1.0;
  if (unit == "deg") return M_PI / 180.0;
  fail(where + ".angle_unit", "expected \"rad\" or \"deg\"");
}

// Fixed-axis roll-pitch-yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
Eigen::Matrix3d rotation_from_rpy(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy(2), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy(1), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy(0), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Json dump_vector(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json parse_text(const std::string& text, const char* kind) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string(kind) + ": " + e.what());
  }
}

}  // namespace

RobotConfig parse_robot_config(const std::string& text) {
  const Json root = parse_text(text, "robot config");
  check_keys(root, "robot", {"name", "notes", "angle_unit", "gravity", "friction_smoothing",
                             "joints", "limits", "spheres", "self_pairs"});
  const double ang = angle_factor(root, "robot");

  RobotConfig config;
  if (root.contains("name")) config.name = as_string(root["name"], "robot.name");

  RobotModel& model = config.model;
  if (root.contains("gravity")) model.gravity = as_vec3(root["gravity"], "robot.gravity");
  if (root.contains("friction_smoothing"))
    model.friction_smoothing = as_number(root["friction_smoothing"], "robot.friction_smoothing");

  const Json& joints = require(root, "robot", "joints");
  if (!joints.is_array() || joints.empty()) fail("robot.joints", "expected a nonempty array");
  for (size_t j = 0; j < joints.size(); ++j) {
    const std::string where = "robot.joints[" + std::to_string(j) + "]";
    const Json& joint = joints[j];
    check_keys(joint, where,
               {"name", "parent", "origin", "axis", "mass", "com", "inertia", "gear_ratio",
                "friction"});
    Link link;
    link.parent = as_int(require(joint, where, "parent"), where + ".parent");

    const Json& origin = require(joint, where, "origin");
    check_keys(origin, where + ".origin", {"xyz", "rpy", "quaternion"});
    link.origin_xyz = as_vec3(require(origin, where + ".origin", "xyz"), where + ".origin.xyz");
    const bool has_rpy = origin.contains("rpy");
    const bool has_quat = origin.contains("quaternion");
    if (has_rpy == has_quat)
      fail(where + ".origin", "provide exactly one of 'rpy' or 'quaternion'");
    if (has_rpy) {
      link.origin_rot = rotation_from_rpy(ang * as_vec3(origin["rpy"], where + ".origin.rpy"));
    } else {
      const Eigen::VectorXd q =
          as_vector(origin["quaternion"], where + ".origin.quaternion", 4);
      Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));  // [w, x, y, z]
      if (std::abs(quat.norm() - 1.0) > 1e-6)
        fail(where + ".origin.quaternion", "quaternion is not normalized");
      link.origin_rot = quat.normalized().toRotationMatrix();
    }

    link.axis = as_vec3(require(joint, where, "axis"), where + ".axis");
    link.mass = as_number(require(joint, where, "mass"), where + ".mass");
    link.com = as_vec3(require(joint, where, "com"), where + ".com");
    const Eigen::VectorXd in =
        as_vector(require(joint, where, "inertia"), where + ".inertia", 6);
    // [ixx, iyy, izz, ixy, ixz, iyz]
    link.inertia << in(0), in(3), in(4), in(3), in(1), in(5), in(4), in(5), in(2);
    if (joint.contains("gear_ratio"))
      link.gear_ratio = as_number(joint["gear_ratio"], where + ".gear_ratio");
    if (joint.contains("friction")) {
      const Json& fr = joint["friction"];
      check_keys(fr, where + ".friction", {"viscous", "coulomb"});
      if (fr.contains("viscous"))
        link.viscous_friction = as_number(fr["viscous"], where + ".friction.viscous");
      if (fr.contains("coulomb"))
        link.coulomb_friction = as_number(fr["coulomb"], where + ".friction.coulomb");
    }
    model.links.push_back(link);
  }
  const int n = model.dof();

  const Json& limits = require(root, "robot", "limits");
  check_keys(limits, "robot.limits", {"q_min", "q_max", "qd_max", "tau_max", "taud_max"});
  model.q_min = ang * as_vector(require(limits, "robot.limits", "q_min"), "robot.limits.q_min", n);
  model.q_max = ang * as_vector(require(limits, "robot.limits", "q_max"), "robot.limits.q_max", n);
  model.qd_max =
      ang * as_vector(require(limits, "robot.limits", "qd_max"), "robot.limits.qd_max", n);
  model.tau_max =
      as_vector(require(limits, "robot.limits", "tau_max"), "robot.limits.tau_max", n);
  model.taud_max =
      as_vector(require(limits, "robot.limits", "taud_max"), "robot.limits.taud_max", n);

  if (root.contains("spheres")) {
    const Json& spheres = root["spheres"];
    if (!spheres.is_array()) fail("robot.spheres", "expected an array");
    for (size_t s = 0; s < spheres.size(); ++s) {
      const std::string where = "robot.spheres[" + std::to_string(s) + "]";
      check_keys(spheres[s], where, {"link", "offset", "radius"});
      RobotSphere sphere;
      sphere.link = as_int(require(spheres[s], where, "link"), where + ".link");
      sphere.offset = as_vec3(require(spheres[s], where, "offset"), where + ".offset");
      sphere.radius = as_number(require(spheres[s], where, "radius"), where + ".radius");
      config.world.robot_spheres.push_back(sphere);
    }
  }

  model.validate();

  if (root.contains("self_pairs")) {
    const Json& pairs = root["self_pairs"];
    if (!pairs.is_array()) fail("robot.self_pairs", "expected an array of index pairs");
    for (size_t p = 0; p < pairs.size(); ++p) {
      const std::string where = "robot.self_pairs[" + std::to_string(p) + "]";
      const Eigen::VectorXd pair = as_vector(pairs[p], where, 2);
      config.world.self_pairs.emplace_back(static_cast<int>(pair(0)),
                                           static_cast<int>(pair(1)));
    }
  } else {
    config.world.self_pairs = default_self_pairs(model, config.world.robot_spheres);
  }
  config.world.validate(model);
  return config;
}

RobotConfig load_robot_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open robot config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_robot_config(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string serialize_robot_config(const RobotConfig& config) {
  Json root;
  root["name"] = config.name;
  root["angle_unit"] = "rad";
  root["gravity"] = dump_vector(config.model.gravity);
  root["friction_smoothing"] = config.model.friction_smoothing;
  root["joints"] = Json::array();
  for (const Link& link : config.model.links) {
    Json joint;
    joint["parent"] = link.parent;
    const Eigen::Quaterniond quat(link.origin_rot);
    joint["origin"] = {{"xyz", dump_vector(link.origin_xyz)},
                       {"quaternion", Json::array({quat.w(), quat.x(), quat.y(), quat.z()})}};
    joint["axis"] = dump_vector(link.axis);
    joint["mass"] = link.mass;
    joint["com"] = dump_vector(link.com);
    const Eigen::Matrix3d& in = link.inertia;
    joint["inertia"] =
        Json::array({in(0, 0), in(1, 1), in(2, 2), in(0, 1), in(0, 2), in(1, 2)});
    joint["gear_ratio"] = link.gear_ratio;
    joint["friction"] = {{"viscous", link.viscous_friction},
                         {"coulomb", link.coulomb_friction}};
    root["joints"].push_back(joint);
  }
  root["limits"] = {{"q_min", dump_vector(config.model.q_min)},
                    {"q_max", dump_vector(config.model.q_max)},
                    {"qd_max", dump_vector(config.model.qd_max)},
                    {"tau_max", dump_vector(config.model.tau_max)},
                    {"taud_max", dump_vector(config.model.taud_max)}};
  root["spheres"] = Json::array();
  for (const RobotSphere& sphere : config.world.robot_spheres) {
    root["spheres"].push_back({{"link", sphere.link},
                               {"offset", dump_vector(sphere.offset)},
                               {"radius", sphere.radius}});
  }
  root["self_pairs"] = Json::array();
  for (const auto& pair : config.world.self_pairs)
    root["self_pairs"].push_back(Json::array({pair.first, pair.second}));
  return root.dump(2) + "\n";
}

ScenarioConfig parse_scenario_config(const std::string& text, const RobotModel& model) {
  const Json root = parse_text(text, "scenario config");
  check_keys(root, "scenario",
             {"name", "angle_unit", "q_start", "q_goal", "tf_min", "tf_max", "tf_guess", "mu",
              "knots", "accel_bc", "enforce_torque_rate", "obstacles", "workspace",
              "squared_margins", "solver"});
  const double ang = angle_factor(root, "scenario");
  const int n = model.dof();

  ScenarioConfig config;
  if (root.contains("name")) config.name = as_string(root["name"], "scenario.name");
  Scenario& sc = config.scenario;
  sc.q_start = ang * as_vector(require(root, "scenario", "q_start"), "scenario.q_start", n);
  sc.q_goal = ang * as_vector(require(root, "scenario", "q_goal"), "scenario.q_goal", n);
  if (root.contains("tf_min")) sc.tf_min = as_number(root["tf_min"], "scenario.tf_min");
  if (root.contains("tf_max")) sc.tf_max = as_number(root["tf_max"], "scenario.tf_max");
  if (root.contains("tf_guess")) sc.tf_guess = as_number(root["tf_guess"], "scenario.tf_guess");
  if (root.contains("mu")) sc.mu = as_number(root["mu"], "scenario.mu");
  if (root.contains("knots")) sc.knots = as_int(root["knots"], "scenario.knots");
  if (root.contains("accel_bc")) sc.accel_bc = as_bool(root["accel_bc"], "scenario.accel_bc");
  if (root.contains("enforce_torque_rate"))
    sc.enforce_torque_rate = as_bool(root["enforce_torque_rate"], "scenario.enforce_torque_rate");

  if (root.contains("obstacles")) {
    const Json& obstacles = root["obstacles"];
    if (!obstacles.is_array()) fail("scenario.obstacles", "expected an array");
    for (size_t o = 0; o < obstacles.size(); ++o) {
      const std::string where = "scenario.obstacles[" + std::to_string(o) + "]";
      check_keys(obstacles[o], where, {"center", "radius"});
      ObstacleSphere sphere;
      sphere.center = as_vec3(require(obstacles[o], where, "center"), where + ".center");
      sphere.radius = as_number(require(obstacles[o], where, "radius"), where + ".radius");
      config.obstacles.push_back(sphere);
    }
  }
  if (root.contains("workspace")) {
    check_keys(root["workspace"], "scenario.workspace", {"lower", "upper"});
    WorkspaceBox box;
    box.lower = as_vec3(require(root["workspace"], "scenario.workspace", "lower"),
                        "scenario.workspace.lower");
    box.upper = as_vec3(require(root["workspace"], "scenario.workspace", "upper"),
                        "scenario.workspace.upper");
    config.workspace = box;
  }
  if (root.contains("squared_margins"))
    config.squared_margins = as_bool(root["squared_margins"], "scenario.squared_margins");

  if (root.contains("solver")) {
    const Json& solver = root["solver"];
    check_keys(solver, "scenario.solver",
               {"tolerance", "max_iterations", "barrier_init", "barrier_reduction",
                "fraction_to_boundary"});
    if (solver.contains("tolerance"))
      config.solver.tolerance = as_number(solver["tolerance"], "scenario.solver.tolerance");
    if (solver.contains("max_iterations"))
      config.solver.max_iterations =
          as_int(solver["max_iterations"], "scenario.solver.max_iterations");
    if (solver.contains("barrier_init"))
      config.solver.barrier_init = as_number(solver["barrier_init"], "scenario.solver.barrier_init");
    if (solver.contains("barrier_reduction"))
      config.solver.barrier_reduction =
          as_number(solver["barrier_reduction"], "scenario.solver.barrier_reduction");
    if (solver.contains("fraction_to_boundary"))
      config.solver.fraction_to_boundary =
          as_number(solver["fraction_to_boundary"], "scenario.solver.fraction_to_boundary");
  }

  config.scenario.validate(model);
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path, const RobotModel& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_config(buf.str(), model);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string serialize_scenario_config(const ScenarioConfig& config) {
  Json root;
  root["name"] = config.name;
  root["angle_unit"] = "rad";
  root["q_start"] = dump_vector(config.scenario.q_start);
  root["q_goal"] = dump_vector(config.scenario.q_goal);
  root["tf_min"] = config.scenario.tf_min;
  root["tf_max"] = config.scenario.tf_max;
  root["tf_guess"] = config.scenario.tf_guess;
  root["mu"] = config.scenario.mu;
  root["knots"] = config.scenario.knots;
  root["accel_bc"] = config.scenario.accel_bc;
  root["enforce_torque_rate"] = config.scenario.enforce_torque_rate;
  root["obstacles"] = Json::array();
  for (const ObstacleSphere& sphere : config.obstacles)
    root["obstacles"].push_back(
        {{"center", dump_vector(sphere.center)}, {"radius", sphere.radius}});
  if (config.workspace) {
    root["workspace"] = {{"lower", dump_vector(config.workspace->lower)},
                         {"upper", dump_vector(config.workspace->upper)}};
  }
  root["squared_margins"] = config.squared_margins;
  root["solver"] = {{"tolerance", config.solver.tolerance},
                    {"max_iterations", config.solver.max_iterations},
                    {"barrier_init", config.solver.barrier_init},
                    {"barrier_reduction", config.solver.barrier_reduction},
                    {"fraction_to_boundary", config.solver.fraction_to_boundary}};
  return root.dump(2) + "\n";
}

CollisionWorld combine_world(const RobotConfig& robot, const ScenarioConfig& scenario) {
  CollisionWorld world = robot.world;
  world.obstacles = scenario.obstacles;
  world.workspace = scenario.workspace;
  world.squared_margins = scenario.squared_margins;
  return world;
}

}  // namespace spectraj
