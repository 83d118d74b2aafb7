#include "spectraj/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spectraj {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_number(const std::string& token, int line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("trajectory csv: bad number '" + token + "' on line " +
                             std::to_string(line));
  }
  if (used != token.size())
    throw std::runtime_error("trajectory csv: bad number '" + token + "' on line " +
                             std::to_string(line));
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> tokens;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, ',')) tokens.push_back(token);
  return tokens;
}

void track(ValidationReport& report, const std::string& family, double worst) {
  report.families.push_back({family, worst});
  report.max_violation = std::max(report.max_violation, worst);
}

}  // namespace

SampledTrajectory sample_uniform(const Trajectory& traj, int count) {
  if (count < 2) throw std::invalid_argument("sample_uniform: need at least 2 samples");
  const int n = traj.model.dof();
  const double tf = traj.grid.horizon();
  SampledTrajectory s;
  s.t.resize(count);
  s.q.resize(count, n);
  s.qd.resize(count, n);
  s.qdd.resize(count, n);
  s.tau.resize(count, n);
  for (int k = 0; k < count; ++k) {
    // the rounded product can land one ulp past tf, so pin the endpoint
    const double t = (k == count - 1) ? tf : tf * k / (count - 1);
    s.t(k) = t;
    const TrajectorySample at = sample(traj, t);
    s.q.row(k) = at.q.transpose();
    s.qd.row(k) = at.qd.transpose();
    s.qdd.row(k) = at.qdd.transpose();
    s.tau.row(k) = at.tau.transpose();
  }
  return s;
}

std::string to_csv(const SampledTrajectory& s) {
  const int n = static_cast<int>(s.q.cols());
  const int count = static_cast<int>(s.t.size());
  std::string out = "t";
  for (const char* name : {"q", "qd", "qdd", "tau"})
    for (int k = 1; k <= n; ++k) out += "," + std::string(name) + "_" + std::to_string(k);
  out += "\n";
  for (int row = 0; row < count; ++row) {
    out += format_number(s.t(row));
    for (const Eigen::MatrixXd* block : {&s.q, &s.qd, &s.qdd, &s.tau})
      for (int k = 0; k < n; ++k) out += "," + format_number((*block)(row, k));
    out += "\n";
  }
  return out;
}

void write_csv(const std::string& path, const SampledTrajectory& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trajectory csv: " + path);
  out << to_csv(s);
}

SampledTrajectory parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectory csv: empty input");
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 5 || (header.size() - 1) % 4 != 0 || header[0] != "t")
    throw std::runtime_error("trajectory csv: header must be t,q_*,qd_*,qdd_*,tau_*");
  const int n = static_cast<int>((header.size() - 1) / 4);
  for (int k = 0; k < n; ++k) {
    const std::string suffix = "_" + std::to_string(k + 1);
    if (header[1 + k] != "q" + suffix || header[1 + n + k] != "qd" + suffix ||
        header[1 + 2 * n + k] != "qdd" + suffix || header[1 + 3 * n + k] != "tau" + suffix)
      throw std::runtime_error("trajectory csv: unexpected column '" + header[1 + k] + "'");
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> tokens = split_line(line);
    if (tokens.size() != header.size())
      throw std::runtime_error("trajectory csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(tokens.size()) + " fields, expected " +
                               std::to_string(header.size()));
    std::vector<double> row(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) row[i] = parse_number(tokens[i], lineno);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error("trajectory csv: need at least 2 rows");

  const int count = static_cast<int>(rows.size());
  SampledTrajectory s;
  s.t.resize(count);
  s.q.resize(count, n);
  s.qd.resize(count, n);
  s.qdd.resize(count, n);
  s.tau.resize(count, n);
  for (int r = 0; r < count; ++r) {
    s.t(r) = rows[r][0];
    if (r > 0 && !(s.t(r) > s.t(r - 1)))
      throw std::runtime_error("trajectory csv: time column must be strictly increasing");
    for (int k = 0; k < n; ++k) {
      s.q(r, k) = rows[r][1 + k];
      s.qd(r, k) = rows[r][1 + n + k];
      s.qdd(r, k) = rows[r][1 + 2 * n + k];
      s.tau(r, k) = rows[r][1 + 3 * n + k];
    }
  }
  return s;
}

SampledTrajectory read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trajectory csv: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

ValidationReport validate_samples(const RobotModel& model, const CollisionWorld& world,
                                  const Scenario& scenario, const SampledTrajectory& s) {
  const int n = model.dof();
  const int count = static_cast<int>(s.t.size());
  if (s.q.cols() != n)
    throw std::invalid_argument("validate_samples: trajectory has " +
                                std::to_string(s.q.cols()) + " joints, model has " +
                                std::to_string(n));

  ValidationReport report;
  double pos = 0.0, vel = 0.0, torque = 0.0;
  for (int r = 0; r < count; ++r) {
    for (int k = 0; k < n; ++k) {
      const double qrange = model.q_max(k) - model.q_min(k);
      pos = std::max(pos, (model.q_min(k) - s.q(r, k)) / qrange);
      pos = std::max(pos, (s.q(r, k) - model.q_max(k)) / qrange);
      vel = std::max(vel, (std::abs(s.qd(r, k)) - model.qd_max(k)) / (2.0 * model.qd_max(k)));
      torque = std::max(torque,
                        (std::abs(s.tau(r, k)) - model.tau_max(k)) / (2.0 * model.tau_max(k)));
    }
  }
  track(report, "position", std::max(0.0, pos));
  track(report, "velocity", std::max(0.0, vel));
  track(report, "torque", std::max(0.0, torque));

  if (scenario.enforce_torque_rate) {
    double rate = 0.0;
    for (int r = 0; r + 1 < count; ++r) {
      const double dt = s.t(r + 1) - s.t(r);
      for (int k = 0; k < n; ++k) {
        const double slope = (s.tau(r + 1, k) - s.tau(r, k)) / dt;
        rate = std::max(rate, (std::abs(slope) - model.taud_max(k)) / (2.0 * model.taud_max(k)));
      }
    }
    track(report, "torque-rate", std::max(0.0, rate));
  }

  if (collision_constraint_count(world) > 0) {
    double collision = 0.0;
    for (int r = 0; r < count; ++r) {
      const Eigen::VectorXd q = s.q.row(r).transpose();
      const Eigen::VectorXd margins = collision_constraint_values(model, world, q);
      collision = std::max(collision, -margins.minCoeff());
    }
    track(report, "collision", std::max(0.0, collision));
  }

  double boundary = 0.0;
  for (int k = 0; k < n; ++k) {
    const double qrange = model.q_max(k) - model.q_min(k);
    boundary = std::max(boundary, std::abs(s.q(0, k) - scenario.q_start(k)) / qrange);
    boundary = std::max(boundary, std::abs(s.q(count - 1, k) - scenario.q_goal(k)) / qrange);
    boundary = std::max(boundary, std::abs(s.qd(0, k)) / (2.0 * model.qd_max(k)));
    boundary = std::max(boundary, std::abs(s.qd(count - 1, k)) / (2.0 * model.qd_max(k)));
  }
  track(report, "boundary", boundary);
  return report;
}

std::string summary_json(const std::string& status, double tf, double cost, int iterations,
                         double max_violation, double wall_time) {
  nlohmann::ordered_json root;
  root["status"] = status;
  root["t_f"] = tf;
  root["cost"] = cost;
  root["iterations"] = iterations;
  root["max_violation"] = max_violation;
  root["wall_time"] = wall_time;
  return root.dump(2) + "\n";
}

}  // namespace spectraj
