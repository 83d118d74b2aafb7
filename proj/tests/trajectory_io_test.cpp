#include "spectraj/trajectory_io.hpp"

#include <gtest/gtest.h>

#include <Eigen/Core>
#include <cmath>

#include "spectraj/templates.hpp"
#include "spectraj/transcription.hpp"

namespace {

using spectraj::CollisionWorld;
using spectraj::RobotModel;
using spectraj::SampledTrajectory;
using spectraj::Scenario;

// Rest-to-rest quintic sweep sampled densely; comfortably inside every limit
// of the two-link arm, torques from inverse dynamics.
struct QuinticCase {
  RobotModel model;
  Scenario scenario;
  SampledTrajectory samples;
};

// The family list omits conditional entries (torque-rate, collision), so the
// fault checks look families up by name.
double family_worst(const spectraj::ValidationReport& report, const std::string& name) {
  for (const spectraj::FamilyViolation& f : report.families)
    if (f.family == name) return f.worst;
  ADD_FAILURE() << "validation family " << name << " missing";
  return 0.0;
}

QuinticCase quintic_case(int count) {
  QuinticCase c;
  c.model = spectraj::two_link_robot().model;
  c.scenario.q_start = Eigen::Vector2d(-0.4, 0.6);
  c.scenario.q_goal = Eigen::Vector2d(0.5, -0.3);
  c.scenario.knots = 8;

  const double horizon = 3.0;
  const Eigen::Vector2d delta = c.scenario.q_goal - c.scenario.q_start;
  SampledTrajectory& s = c.samples;
  s.t.resize(count);
  s.q.resize(count, 2);
  s.qd.resize(count, 2);
  s.qdd.resize(count, 2);
  s.tau.resize(count, 2);
  for (int r = 0; r < count; ++r) {
    const double t = horizon * r / (count - 1);
    const double u = t / horizon;
    const double shape = ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
    const double dshape = ((30.0 * u - 60.0) * u + 30.0) * u * u / horizon;
    const double ddshape = ((120.0 * u - 180.0) * u + 60.0) * u / (horizon * horizon);
    s.t(r) = t;
    s.q.row(r) = (c.scenario.q_start + shape * delta).transpose();
    s.qd.row(r) = (dshape * delta).transpose();
    s.qdd.row(r) = (ddshape * delta).transpose();
    s.tau.row(r) = spectraj::inverse_dynamics<double>(c.model, s.q.row(r).transpose(),
                                                      s.qd.row(r).transpose(),
                                                      s.qdd.row(r).transpose())
                       .transpose();
  }
  return c;
}

TEST(SampleUniformTest, CoversHorizonInclusive) {
  const auto robot = spectraj::two_link_robot();
  Scenario scenario;
  scenario.q_start = Eigen::Vector2d(-0.5, 0.5);
  scenario.q_goal = Eigen::Vector2d(0.5, -0.5);
  scenario.tf_guess = 2.0;
  scenario.knots = 6;
  const spectraj::Transcription transcription(robot.model, robot.world, scenario);
  const spectraj::Trajectory traj =
      transcription.extract_trajectory(transcription.initial_guess());

  const SampledTrajectory s = spectraj::sample_uniform(traj, 101);
  ASSERT_EQ(s.t.size(), 101);
  EXPECT_DOUBLE_EQ(s.t(0), 0.0);
  EXPECT_DOUBLE_EQ(s.t(100), 2.0);
  EXPECT_NEAR(s.t(1) - s.t(0), 0.02, 1e-15);
  // First row is the start state of the sweep.
  EXPECT_LT((s.q.row(0).transpose() - scenario.q_start).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((s.q.row(100).transpose() - scenario.q_goal).cwiseAbs().maxCoeff(), 1e-10);

  EXPECT_THROW(spectraj::sample_uniform(traj, 1), std::invalid_argument);
}

TEST(CsvTest, HeaderAndRoundTrip) {
  const QuinticCase c = quintic_case(40);
  const std::string text = spectraj::to_csv(c.samples);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,q_1,q_2,qd_1,qd_2,qdd_1,qdd_2,tau_1,tau_2");

  const SampledTrajectory back = spectraj::parse_csv(text);
  ASSERT_EQ(back.t.size(), c.samples.t.size());
  EXPECT_LT((back.t - c.samples.t).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((back.q - c.samples.q).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((back.tau - c.samples.tau).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CsvTest, OutputBytesAreStable) {
  const QuinticCase c = quintic_case(25);
  const std::string once = spectraj::to_csv(c.samples);
  // Parsing and reprinting reproduces the bytes: the 12-digit format is a
  // fixed point of the parse/print pair.
  EXPECT_EQ(spectraj::to_csv(spectraj::parse_csv(once)), once);
}

TEST(CsvTest, FileRoundTrip) {
  const QuinticCase c = quintic_case(30);
  const std::string path = testing::TempDir() + "/traj_io_test.csv";
  spectraj::write_csv(path, c.samples);
  const SampledTrajectory back = spectraj::read_csv_file(path);
  EXPECT_EQ(spectraj::to_csv(back), spectraj::to_csv(c.samples));
  EXPECT_THROW(spectraj::read_csv_file(path + ".missing"), std::runtime_error);
}

TEST(CsvTest, RejectsMalformedInput) {
  EXPECT_THROW(spectraj::parse_csv(""), std::runtime_error);
  EXPECT_THROW(spectraj::parse_csv("a,b,c\n1,2,3\n"), std::runtime_error);
  // Wrong column naming.
  EXPECT_THROW(spectraj::parse_csv("t,q_1,qd_1,qdd_1,torque_1\n0,0,0,0,0\n1,0,0,0,0\n"),
               std::runtime_error);
  // Non-increasing time.
  EXPECT_THROW(
      spectraj::parse_csv("t,q_1,qd_1,qdd_1,tau_1\n0,0,0,0,0\n1,0,0,0,0\n0.5,0,0,0,0\n"),
      std::runtime_error);
  // Trailing garbage in a number.
  EXPECT_THROW(spectraj::parse_csv("t,q_1,qd_1,qdd_1,tau_1\n0,0,0,0,0\n1,0,0x,0,0\n"),
               std::runtime_error);
  // Short row.
  EXPECT_THROW(spectraj::parse_csv("t,q_1,qd_1,qdd_1,tau_1\n0,0,0,0,0\n1,0,0\n"),
               std::runtime_error);
  // Single data row.
  EXPECT_THROW(spectraj::parse_csv("t,q_1,qd_1,qdd_1,tau_1\n0,0,0,0,0\n"), std::runtime_error);
}

TEST(ValidateTest, CleanTrajectoryPassesAllFamilies) {
  const QuinticCase c = quintic_case(200);
  CollisionWorld world = spectraj::two_link_robot().world;
  world.obstacles.push_back({Eigen::Vector3d(5.0, 5.0, 5.0), 0.1});

  const spectraj::ValidationReport report =
      spectraj::validate_samples(c.model, world, c.scenario, c.samples);
  ASSERT_EQ(report.families.size(), 6u);
  EXPECT_EQ(report.families[0].family, "position");
  EXPECT_EQ(report.families[1].family, "velocity");
  EXPECT_EQ(report.families[2].family, "torque");
  EXPECT_EQ(report.families[3].family, "torque-rate");
  EXPECT_EQ(report.families[4].family, "collision");
  EXPECT_EQ(report.families[5].family, "boundary");
  EXPECT_LT(report.max_violation, 1e-12);
  EXPECT_TRUE(report.passed(1e-4));
}

TEST(ValidateTest, InjectedFaultsAreFlaggedPerFamily) {
  CollisionWorld world;  // no collision rows
  {
    QuinticCase c = quintic_case(120);
    c.samples.tau(60, 0) = 1.5 * c.model.tau_max(0);
    const auto report = spectraj::validate_samples(c.model, world, c.scenario, c.samples);
    EXPECT_NEAR(family_worst(report, "torque"), 0.25, 1e-12);  // (90-60)/120
    EXPECT_FALSE(report.passed(1e-4));
  }
  {
    QuinticCase c = quintic_case(120);
    c.samples.qd(10, 1) = 2.0 * c.model.qd_max(1);
    const auto report = spectraj::validate_samples(c.model, world, c.scenario, c.samples);
    EXPECT_NEAR(family_worst(report, "velocity"), 0.5, 1e-12);
  }
  {
    QuinticCase c = quintic_case(120);
    c.samples.q(119, 0) += 0.1;  // endpoint misses the goal
    const auto report = spectraj::validate_samples(c.model, world, c.scenario, c.samples);
    EXPECT_NEAR(family_worst(report, "boundary"), 0.1 / 5.8, 1e-9);
  }
  {
    // A torque step between adjacent samples violates the rate limit through
    // the secant slope.
    QuinticCase c = quintic_case(120);
    c.samples.tau(40, 0) += 20.0;
    const auto report = spectraj::validate_samples(c.model, world, c.scenario, c.samples);
    EXPECT_GT(family_worst(report, "torque-rate"), 0.1);
  }
  {
    // Obstacle parked on the tip path; worst collision violation is the
    // deepest penetration in meters.
    QuinticCase c = quintic_case(120);
    CollisionWorld blocked = spectraj::two_link_robot().world;
    const Eigen::VectorXd mid_q = c.samples.q.row(60).transpose();
    const auto poses = spectraj::forward_kinematics<double>(c.model, mid_q);
    const Eigen::Vector3d tip =
        poses[1].position + poses[1].rotation * Eigen::Vector3d(0.4, 0.0, 0.0);
    blocked.obstacles.push_back({tip, 0.1});
    const auto report = spectraj::validate_samples(c.model, blocked, c.scenario, c.samples);
    EXPECT_NEAR(family_worst(report, "collision"), 0.17, 1e-6);  // radii sum, centers coincide
    EXPECT_FALSE(report.passed(1e-4));
  }
}

TEST(ValidateTest, DimensionMismatchThrows) {
  const QuinticCase c = quintic_case(20);
  SampledTrajectory wrong = c.samples;
  wrong.q.resize(20, 3);
  EXPECT_THROW(spectraj::validate_samples(c.model, CollisionWorld{}, c.scenario, wrong),
               std::invalid_argument);
}

TEST(SummaryJsonTest, FieldsPresent) {
  const std::string text =
      spectraj::summary_json("converged", 1.75, 1.9, 24, 3e-7, 0.42);
  EXPECT_NE(text.find("\"status\": \"converged\""), std::string::npos);
  EXPECT_NE(text.find("\"t_f\": 1.75"), std::string::npos);
  EXPECT_NE(text.find("\"iterations\": 24"), std::string::npos);
  EXPECT_NE(text.find("\"max_violation\""), std::string::npos);
  EXPECT_NE(text.find("\"wall_time\""), std::string::npos);
}

}  // namespace
