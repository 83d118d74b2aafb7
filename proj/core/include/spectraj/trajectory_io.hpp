#pragma once

// Dense sampling, CSV import/export, and sample-based constraint validation.
// The CSV layout is t, q_1..q_n, qd_1..qd_n, qdd_1..qdd_n, tau_1..tau_n with
// 12 significant digits, so identical inputs produce identical bytes.

#include <string>
#include <vector>

#include "spectraj/collision.hpp"
#include "spectraj/robot.hpp"
#include "spectraj/transcription.hpp"

namespace spectraj {

struct SampledTrajectory {
  Eigen::VectorXd t;                 // strictly increasing, t(0) = 0
  Eigen::MatrixXd q, qd, qdd, tau;   // rows = samples, cols = joints
};

// count >= 2 uniform samples covering [0, t_f] inclusive.
SampledTrajectory sample_uniform(const Trajectory& traj, int count);

std::string to_csv(const SampledTrajectory& s);
void write_csv(const std::string& path, const SampledTrajectory& s);
SampledTrajectory parse_csv(const std::string& text);
SampledTrajectory read_csv_file(const std::string& path);

struct FamilyViolation {
  std::string family;  // position, velocity, torque, torque-rate, collision, boundary
  double worst = 0.0;  // largest scaled violation over all samples, 0 when satisfied
};

struct ValidationReport {
  std::vector<FamilyViolation> families;
  double max_violation = 0.0;

  bool passed(double tolerance) const { return max_violation <= tolerance; }
};

// Checks every sample row against the limit families, collision margins
// recomputed from q, and the scenario boundary conditions. Limit violations
// are scaled by the limit range, collision margins are in meters, torque
// rates come from secant slopes between consecutive rows.
ValidationReport validate_samples(const RobotModel& model, const CollisionWorld& world,
                                  const Scenario& scenario, const SampledTrajectory& s);

std::string summary_json(const std::string& status, double tf, double cost, int iterations,
                         double max_violation, double wall_time);

}  // namespace spectraj
