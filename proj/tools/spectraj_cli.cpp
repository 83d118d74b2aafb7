// Command-line planner front end: plan trajectories from robot/scenario JSON,
// validate exported CSVs densely, and emit the shipped templates.
//
// Exit codes: 0 success, 2 input error, 3 solver failure, 4 validation
// failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spectraj/config.hpp"
#include "spectraj/templates.hpp"
#include "spectraj/trajectory_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitValidation = 4;
constexpr double kValidationTol = 1e-4;

struct PlanArgs {
  std::string robot_path, scenario_path, output_prefix;
  int samples = 1000;
  std::optional<int> knots;
  std::optional<double> mu;
  std::optional<double> tol;
  std::string log_path;
  int seed = 0;  // reserved; the solver is deterministic
};

void print_report(const spectraj::ValidationReport& report) {
  for (const auto& family : report.families) {
    std::cout << std::left << std::setw(14) << family.family << " worst violation "
              << std::scientific << std::setprecision(3) << family.worst << '\n';
  }
  std::cout.unsetf(std::ios::scientific);
}

int run_plan(const PlanArgs& args) {
  spectraj::RobotConfig robot;
  spectraj::ScenarioConfig scenario;
  try {
    robot = spectraj::load_robot_config(args.robot_path);
    scenario = spectraj::load_scenario_config(args.scenario_path, robot.model);
    if (args.knots) scenario.scenario.knots = *args.knots;
    if (args.mu) scenario.scenario.mu = *args.mu;
    if (args.tol) scenario.solver.tolerance = *args.tol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  std::optional<spectraj::Transcription> transcription;
  try {
    transcription.emplace(robot.model, spectraj::combine_world(robot, scenario),
                          scenario.scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  std::ofstream log_stream;
  spectraj::SolverOptions options = scenario.solver;
  if (!args.log_path.empty()) {
    log_stream.open(args.log_path);
    if (!log_stream) {
      std::cerr << "error: cannot open log file " << args.log_path << '\n';
      return kExitInput;
    }
    options.log = &log_stream;
  }

  spectraj::SolveResult result;
  try {
    result = spectraj::solve(transcription->build_nlp(), transcription->initial_guess(), options);
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    std::ofstream summary(args.output_prefix + "_summary.json");
    summary << spectraj::summary_json("error", 0.0, 0.0, 0, 0.0, 0.0);
    return kExitSolver;
  }

  spectraj::ValidationReport report;
  double horizon = 0.0;
  try {
    const spectraj::Trajectory traj = transcription->extract_trajectory(result.z);
    horizon = traj.grid.horizon();
    const spectraj::SampledTrajectory dense = spectraj::sample_uniform(traj, args.samples);
    report = spectraj::validate_samples(robot.model, transcription->world(), scenario.scenario,
                                        dense);
    spectraj::write_csv(args.output_prefix + ".csv", dense);
  } catch (const std::exception& e) {
    std::cerr << "export error: " << e.what() << '\n';
    std::ofstream summary(args.output_prefix + "_summary.json");
    summary << spectraj::summary_json("error", 0.0, 0.0, result.iterations, 0.0,
                                      result.wall_time);
    return kExitSolver;
  }
  std::ofstream summary(args.output_prefix + "_summary.json");
  summary << spectraj::summary_json(spectraj::to_string(result.status), horizon,
                                    result.objective, result.iterations, report.max_violation,
                                    result.wall_time);

  std::cout << "status        " << spectraj::to_string(result.status) << '\n'
            << "t_f           " << horizon << " s\n"
            << "cost          " << result.objective << '\n'
            << "iterations    " << result.iterations << '\n';
  print_report(report);

  if (result.status != spectraj::SolveStatus::kConverged) {
    std::cerr << "solver did not converge: " << result.message << '\n';
    return kExitSolver;
  }
  if (!report.passed(kValidationTol)) {
    std::cerr << "dense validation failed (worst " << report.max_violation << ")\n";
    return kExitValidation;
  }
  return kExitOk;
}

int run_validate(const std::string& robot_path, const std::string& scenario_path,
                 const std::string& csv_path) {
  try {
    const spectraj::RobotConfig robot = spectraj::load_robot_config(robot_path);
    const spectraj::ScenarioConfig scenario =
        spectraj::load_scenario_config(scenario_path, robot.model);
    const spectraj::SampledTrajectory samples = spectraj::read_csv_file(csv_path);
    const spectraj::ValidationReport report =
        spectraj::validate_samples(robot.model, spectraj::combine_world(robot, scenario),
                                   scenario.scenario, samples);
    print_report(report);
    return report.passed(kValidationTol) ? kExitOk : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run_template(const std::string& kind, const std::string& output_prefix) {
  std::string robot_json, scenario_json;
  if (kind == "two-link") {
    robot_json = spectraj::two_link_robot_json();
    scenario_json = spectraj::two_link_scenario_json();
  } else if (kind == "six-axis") {
    robot_json = spectraj::six_axis_robot_json();
    scenario_json = spectraj::six_axis_scenario_json();
  } else {
    std::cerr << "error: unknown template kind '" << kind
              << "' (expected two-link or six-axis)\n";
    return kExitInput;
  }

  if (!output_prefix.empty()) {
    const std::string robot_path = output_prefix + "_robot.json";
    const std::string scenario_path = output_prefix + "_scenario.json";
    std::ofstream robot_out(robot_path);
    std::ofstream scenario_out(scenario_path);
    if (!robot_out || !scenario_out) {
      std::cerr << "error: cannot write template files with prefix " << output_prefix << '\n';
      return kExitInput;
    }
    robot_out << robot_json;
    scenario_out << scenario_json;
    std::cout << "wrote " << robot_path << " and " << scenario_path << '\n';
    return kExitOk;
  }

  nlohmann::ordered_json combined;
  combined["robot"] = nlohmann::ordered_json::parse(robot_json);
  combined["scenario"] = nlohmann::ordered_json::parse(scenario_json);
  std::cout << combined.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal joint trajectory planner for serial robot arms"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand("plan", "Plan a trajectory and export CSV + summary");
  plan->add_option("robot", plan_args.robot_path, "Robot JSON file")->required();
  plan->add_option("scenario", plan_args.scenario_path, "Scenario JSON file")->required();
  plan->add_option("output", plan_args.output_prefix, "Output path prefix")->required();
  plan->add_option("--samples", plan_args.samples, "Export sample count")
      ->default_val(1000)
      ->check(CLI::Range(2, 10000000));
  plan->add_option("--knots", plan_args.knots, "Override the scenario knot count N");
  plan->add_option("--mu", plan_args.mu, "Override the jerk regularization weight");
  plan->add_option("--tol", plan_args.tol, "Override the solver KKT tolerance");
  plan->add_option("--log", plan_args.log_path, "Write the solver iteration log to this file");
  plan->add_option("--seed", plan_args.seed, "Reserved; the solver is deterministic");

  std::string v_robot, v_scenario, v_csv;
  CLI::App* validate = app.add_subcommand("validate", "Re-check an exported trajectory CSV");
  validate->add_option("robot", v_robot, "Robot JSON file")->required();
  validate->add_option("scenario", v_scenario, "Scenario JSON file")->required();
  validate->add_option("csv", v_csv, "Trajectory CSV file")->required();

  std::string kind, template_prefix;
  CLI::App* tmpl = app.add_subcommand("template", "Emit a shipped robot/scenario template");
  tmpl->add_option("kind", kind, "two-link or six-axis")->required();
  tmpl->add_option("--output-prefix", template_prefix,
                   "Write <prefix>_robot.json and <prefix>_scenario.json instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (plan->parsed()) return run_plan(plan_args);
  if (validate->parsed()) return run_validate(v_robot, v_scenario, v_csv);
  return run_template(kind, template_prefix);
}
