// Acceptance gate for the toolkit. Each test checks one numbered criterion
// and prints a single [CRITERION k] PASS/FAIL line, so the whole gate can be
// read off the test log. Planning solves shared between criteria are cached.

#include <gtest/gtest.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spectraj/autodiff.hpp"
#include "spectraj/chebyshev.hpp"
#include "spectraj/collision.hpp"
#include "spectraj/config.hpp"
#include "spectraj/dynamics.hpp"
#include "spectraj/solver.hpp"
#include "spectraj/templates.hpp"
#include "spectraj/trajectory_io.hpp"
#include "spectraj/transcription.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class AcceptanceTest : public testing::Test {
 protected:
  void criterion(int number, std::string description) {
    number_ = number;
    description_ = std::move(description);
  }

  void TearDown() override {
    std::printf("[CRITERION %d] %s - %s\n", number_, HasFailure() ? "FAIL" : "PASS",
                description_.c_str());
    std::fflush(stdout);
  }

 private:
  int number_ = 0;
  std::string description_;
};

// One solve of the shipped two-link obstacle scenario. Criteria 6 through 9
// compare these across (mu, knots) settings, so results are cached.
struct PlanOutcome {
  spectraj::RobotModel model;
  spectraj::CollisionWorld world;
  spectraj::Scenario scenario;
  spectraj::SolveResult result;
  std::optional<spectraj::Trajectory> trajectory;
  bool guess_in_collision = false;
  double tf = 0.0;
};

const PlanOutcome& demo_plan(double mu, int knots) {
  static std::map<std::pair<double, int>, PlanOutcome> cache;
  const auto key = std::make_pair(mu, knots);
  const auto found = cache.find(key);
  if (found != cache.end()) return found->second;

  const spectraj::RobotConfig robot = spectraj::two_link_robot();
  spectraj::ScenarioConfig config = spectraj::two_link_scenario();
  config.scenario.mu = mu;
  config.scenario.knots = knots;

  PlanOutcome outcome;
  outcome.model = robot.model;
  outcome.world = spectraj::combine_world(robot, config);
  outcome.scenario = config.scenario;

  const spectraj::Transcription transcription(outcome.model, outcome.world, outcome.scenario);
  const Eigen::VectorXd guess = transcription.initial_guess();

  const spectraj::DecisionVector unpacked =
      spectraj::unpack(guess, transcription.dof(), knots);
  double worst_margin = kInf;
  for (int k = 0; k <= knots; ++k) {
    const Eigen::VectorXd q = unpacked.states.row(k).head(transcription.dof());
    const Eigen::VectorXd margins =
        spectraj::collision_constraint_values<double>(outcome.model, outcome.world, q);
    worst_margin = std::min(worst_margin, margins.minCoeff());
  }
  outcome.guess_in_collision = worst_margin < 0.0;

  outcome.result = spectraj::solve(transcription.build_nlp(), guess);
  outcome.trajectory = transcription.extract_trajectory(outcome.result.z);
  outcome.tf = outcome.result.z(0);
  return cache.emplace(key, std::move(outcome)).first->second;
}

TEST_F(AcceptanceTest, Criterion1) {
  criterion(1, "spectral derivative and quadrature are exact on polynomials");
  const auto start = Clock::now();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> horizon(0.5, 3.0);
  for (const int order : {4, 8, 12, 16}) {
    std::uniform_int_distribution<int> degree(0, order);
    for (int trial = 0; trial < 20; ++trial) {
      const double tf = horizon(rng);
      const spectraj::KnotGrid grid = spectraj::chebyshev_knots(order, tf);
      const oracles::Polynomial poly = oracles::random_polynomial(rng, degree(rng));

      Eigen::VectorXd values(grid.size()), exact(grid.size());
      for (int i = 0; i < grid.size(); ++i) {
        values(i) = poly.value(grid.knots()(i));
        exact(i) = poly.derivative(grid.knots()(i));
      }
      const Eigen::VectorXd numeric = (2.0 / tf) * (spectraj::diff_matrix(grid) * values);
      const double slope_scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
      EXPECT_LT((numeric - exact).cwiseAbs().maxCoeff(), 1e-10 * slope_scale);

      const double quadrature = spectraj::clenshaw_curtis_weights(grid).dot(values);
      const double integral = poly.integral(0.0, tf);
      EXPECT_LT(std::abs(quadrature - integral), 1e-10 * std::max(1.0, std::abs(integral)));
    }
  }
  EXPECT_LT(seconds_since(start), 1.0);
}

TEST_F(AcceptanceTest, Criterion2) {
  criterion(2, "interpolation error for exp(t) decays below 1e-9 by N=12");
  const double tf = 2.0;
  std::vector<double> errors;
  for (const int order : {4, 6, 8, 10, 12}) {
    const spectraj::KnotGrid grid = spectraj::chebyshev_knots(order, tf);
    const Eigen::VectorXd values = grid.knots().array().exp();
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = tf * i / 200.0;
      worst = std::max(worst,
                       std::abs(spectraj::barycentric_eval(grid, values, t) - std::exp(t)));
    }
    errors.push_back(worst);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_LT(errors[i], errors[i - 1]);
  EXPECT_LT(errors.back(), 1e-9);
}

TEST_F(AcceptanceTest, Criterion3) {
  criterion(3, "recursive dynamics agree with closed form and round-trip");
  const auto start = Clock::now();
  const oracles::PlanarArmParams params = oracles::two_link_params();
  const spectraj::RobotModel two_link = spectraj::two_link_robot().model;

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI), rate(-3.0, 3.0),
      accel(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd q(2), qd(2), qdd(2);
    q << angle(rng), angle(rng);
    qd << rate(rng), rate(rng);
    qdd << accel(rng), accel(rng);
    const Eigen::VectorXd tau = spectraj::inverse_dynamics(two_link, q, qd, qdd);
    const Eigen::Vector2d expected = oracles::planar_torque(params, q, qd, qdd);
    EXPECT_LT((tau - expected).cwiseAbs().maxCoeff(), 1e-9);
  }

  const std::vector<spectraj::RobotModel> models = {testmodels::pendulum(), two_link,
                                                    spectraj::six_axis_robot().model};
  for (const spectraj::RobotModel& model : models) {
    const int n = model.dof();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXd q(n), qd(n), tau(n);
      for (int j = 0; j < n; ++j) {
        q(j) = 0.9 * (model.q_min(j) + (unit(rng) * 0.5 + 0.5) * (model.q_max(j) - model.q_min(j)));
        qd(j) = unit(rng) * model.qd_max(j);
        tau(j) = unit(rng) * model.tau_max(j);
      }
      const Eigen::VectorXd qdd = spectraj::forward_dynamics(model, q, qd, tau);
      const Eigen::VectorXd tau_back = spectraj::inverse_dynamics(model, q, qd, qdd);
      const double scale = std::max(1.0, tau.cwiseAbs().maxCoeff());
      EXPECT_LT((tau_back - tau).cwiseAbs().maxCoeff(), 1e-9 * scale);
    }
  }
  EXPECT_LT(seconds_since(start), 5.0);
}

TEST_F(AcceptanceTest, Criterion4) {
  criterion(4, "transcription derivatives match central finite differences");
  const auto start = Clock::now();
  const spectraj::RobotConfig robot = spectraj::two_link_robot();
  spectraj::ScenarioConfig config = spectraj::two_link_scenario();
  config.scenario.knots = 8;
  const spectraj::Transcription transcription(
      robot.model, spectraj::combine_world(robot, config), config.scenario);
  const spectraj::NLPSpec nlp = transcription.build_nlp();
  const Eigen::VectorXd base = transcription.initial_guess();

  std::mt19937 rng(37);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd z = base;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += noise(rng);
    z(0) = std::max(z(0), 1.0);

    const Eigen::MatrixXd analytic = spectraj::jacobian(*nlp.constraints, z);
    const Eigen::MatrixXd numeric = oracles::numeric_jacobian(
        [&](const Eigen::VectorXd& x) {
          Eigen::VectorXd y;
          nlp.constraints->evaluate(x, y);
          return y;
        },
        z, 1e-6);
    const double jac_scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    EXPECT_LT((analytic - numeric).cwiseAbs().maxCoeff(), 1e-6 * jac_scale);

    const Eigen::VectorXd grad = spectraj::gradient(*nlp.objective, z);
    const Eigen::MatrixXd grad_fd = oracles::numeric_jacobian(
        [&](const Eigen::VectorXd& x) {
          Eigen::VectorXd y;
          nlp.objective->evaluate(x, y);
          return y;
        },
        z, 1e-6);
    const double grad_scale = std::max(1.0, grad_fd.cwiseAbs().maxCoeff());
    EXPECT_LT((grad.transpose() - grad_fd).cwiseAbs().maxCoeff(), 1e-6 * grad_scale);
  }
  EXPECT_LT(seconds_since(start), 30.0);
}

TEST_F(AcceptanceTest, Criterion5) {
  criterion(5, "double-integrator minimum time lands within 5% of 2.0");
  const auto start = Clock::now();
  spectraj::Scenario scenario;
  scenario.q_start = Eigen::VectorXd::Zero(1);
  scenario.q_goal = Eigen::VectorXd::Ones(1);
  scenario.tf_min = 0.2;
  scenario.tf_max = 30.0;
  scenario.tf_guess = 10.0;
  scenario.mu = 0.0;
  scenario.knots = 12;
  scenario.accel_bc = false;
  scenario.enforce_torque_rate = false;

  const spectraj::Transcription transcription(testmodels::unit_integrator(),
                                              spectraj::CollisionWorld{}, scenario);
  const spectraj::SolveResult result =
      spectraj::solve(transcription.build_nlp(), transcription.initial_guess());
  EXPECT_EQ(result.status, spectraj::SolveStatus::kConverged) << result.message;
  // Rest-to-rest unit displacement under |u| <= 1 takes 2 seconds.
  EXPECT_NEAR(result.z(0), 2.0, 0.1);
  EXPECT_LT(seconds_since(start), 10.0);
}

TEST_F(AcceptanceTest, Criterion6) {
  criterion(6, "shipped obstacle scenario solves and dense validation passes");
  const auto start = Clock::now();
  const PlanOutcome& plan = demo_plan(0.3, 12);
  EXPECT_TRUE(plan.guess_in_collision);
  ASSERT_EQ(plan.result.status, spectraj::SolveStatus::kConverged) << plan.result.message;

  const spectraj::SampledTrajectory samples = spectraj::sample_uniform(*plan.trajectory, 1000);
  const spectraj::ValidationReport report =
      spectraj::validate_samples(plan.model, plan.world, plan.scenario, samples);
  EXPECT_LE(report.max_violation, 1e-4);
  EXPECT_LT(seconds_since(start), 60.0);
}

TEST_F(AcceptanceTest, Criterion7) {
  criterion(7, "jerk regularization never shortens the minimum time");
  const PlanOutcome& regularized = demo_plan(0.3, 12);
  const PlanOutcome& pure = demo_plan(0.0, 12);
  ASSERT_EQ(pure.result.status, spectraj::SolveStatus::kConverged) << pure.result.message;
  EXPECT_GE(regularized.tf, pure.tf - 1e-6);
}

TEST_F(AcceptanceTest, Criterion8) {
  criterion(8, "grid refinement does not worsen the minimum time");
  const PlanOutcome& coarse = demo_plan(0.3, 8);
  const PlanOutcome& fine = demo_plan(0.3, 12);
  ASSERT_EQ(coarse.result.status, spectraj::SolveStatus::kConverged) << coarse.result.message;
  EXPECT_LE(fine.tf, coarse.tf + 1e-3);
  EXPECT_LT(coarse.result.wall_time, fine.result.wall_time);
}

TEST_F(AcceptanceTest, Criterion9) {
  criterion(9, "a torque or torque-rate limit is active at the pure-time optimum");
  const PlanOutcome& pure = demo_plan(0.0, 12);
  ASSERT_EQ(pure.result.status, spectraj::SolveStatus::kConverged) << pure.result.message;

  const spectraj::Trajectory& traj = *pure.trajectory;
  const Eigen::VectorXd& tau_max = pure.model.tau_max;
  const Eigen::VectorXd& taud_max = pure.model.taud_max;
  const Eigen::MatrixXd slopes =
      (2.0 / pure.tf) * (spectraj::diff_matrix(traj.grid) * traj.controls);

  // Normalized headroom to the nearest bound over all torque and torque-rate
  // entries; a minimum-time solution must ride at least one of them.
  double headroom = kInf;
  for (int k = 0; k < traj.controls.rows(); ++k) {
    for (int j = 0; j < traj.controls.cols(); ++j) {
      headroom = std::min(
          headroom, (tau_max(j) - std::abs(traj.controls(k, j))) / (2.0 * tau_max(j)));
      headroom =
          std::min(headroom, (taud_max(j) - std::abs(slopes(k, j))) / (2.0 * taud_max(j)));
    }
  }
  EXPECT_LE(headroom, 1e-3);
}

TEST_F(AcceptanceTest, Criterion10) {
  criterion(10, "reference solver problems converge with replayable residuals");
  const auto start = Clock::now();

  const auto check = [](const spectraj::NLPSpec& spec, const Eigen::VectorXd& z0) {
    const spectraj::SolveResult result = spectraj::solve(spec, z0);
    EXPECT_EQ(result.status, spectraj::SolveStatus::kConverged) << result.message;
    const spectraj::KKTResiduals replay =
        spectraj::kkt_residuals(spec, result.z, result.multipliers);
    EXPECT_EQ(replay.stationarity, result.residuals.stationarity);
    EXPECT_EQ(replay.feasibility, result.residuals.feasibility);
    EXPECT_EQ(replay.complementarity, result.residuals.complementarity);
    EXPECT_LE(replay.overall(), 1e-6);
    return result;
  };

  spectraj::NLPSpec quadratic;
  quadratic.num_variables = 1;
  quadratic.objective = spectraj::make_function(1, 1, [](const auto& x, auto& y) {
    y(0) = (x(0) - 1.0) * (x(0) - 1.0);
  });
  quadratic.z_lower = Eigen::VectorXd::Constant(1, -kInf);
  quadratic.z_upper = Eigen::VectorXd::Constant(1, kInf);
  const spectraj::SolveResult qr = check(quadratic, Eigen::VectorXd::Constant(1, 5.0));
  EXPECT_NEAR(qr.z(0), 1.0, 1e-5);

  spectraj::NLPSpec bounded;
  bounded.num_variables = 1;
  bounded.objective = spectraj::make_function(1, 1, [](const auto& x, auto& y) { y(0) = x(0); });
  bounded.z_lower = Eigen::VectorXd::Constant(1, 3.0);
  bounded.z_upper = Eigen::VectorXd::Constant(1, kInf);
  const spectraj::SolveResult br = check(bounded, Eigen::VectorXd::Constant(1, 7.0));
  EXPECT_NEAR(br.z(0), 3.0, 1e-5);
  EXPECT_NEAR(br.multipliers.bound_lower(0), 1.0, 1e-5);

  spectraj::NLPSpec rosenbrock;
  rosenbrock.num_variables = 2;
  rosenbrock.objective = spectraj::make_function(2, 1, [](const auto& x, auto& y) {
    const auto a = x(1) - x(0) * x(0);
    const auto b = 1.0 - x(0);
    y(0) = 100.0 * a * a + b * b;
  });
  rosenbrock.z_lower = Eigen::VectorXd::Constant(2, -kInf);
  rosenbrock.z_upper = Eigen::VectorXd::Constant(2, kInf);
  const spectraj::SolveResult rr = check(rosenbrock, Eigen::Vector2d(-1.2, 1.0));
  EXPECT_NEAR(rr.z(0), 1.0, 1e-5);
  EXPECT_NEAR(rr.z(1), 1.0, 1e-5);

  EXPECT_LT(seconds_since(start), 1.0);
}

}  // namespace
