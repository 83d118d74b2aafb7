#pragma once

// Collocated transcription of the minimum-time planning problem. The decision
// vector stacks (t_f, knot states, knot torques); dynamics enter as spectral
// defect equalities, limits as variable bounds or general constraint rows, and
// the cost is elapsed time plus a quadrature of the weighted squared jerk.

#include <Eigen/Core>
#include <memory>

#include "spectraj/chebyshev.hpp"
#include "spectraj/collision.hpp"
#include "spectraj/dynamics.hpp"
#include "spectraj/robot.hpp"
#include "spectraj/solver.hpp"

namespace spectraj {

struct Scenario {
  Eigen::VectorXd q_start;  // [rad]
  Eigen::VectorXd q_goal;   // [rad]
  double tf_min = 0.1;      // [s]
  double tf_max = 30.0;     // [s]
  double tf_guess = 10.0;   // [s]
  double mu = 0.3;          // jerk-regularization weight, >= 0
  int knots = 12;           // grid order N (N+1 knots)
  bool accel_bc = true;     // zero-acceleration endpoint conditions
  bool enforce_torque_rate = true;

  void validate(const RobotModel& model) const;
};

// Flat layout: z = [t_f, states row-major, controls row-major]. State rows are
// [q, qd] per knot, ordered like the grid (T_0 = t_f first, T_N = 0 last).
struct DecisionVector {
  double tf = 0.0;
  Eigen::MatrixXd states;    // (N+1) x 2n
  Eigen::MatrixXd controls;  // (N+1) x n
};

int decision_size(int dof, int order);
Eigen::VectorXd pack(const DecisionVector& d);
DecisionVector unpack(const Eigen::VectorXd& z, int dof, int order);

struct Trajectory {
  RobotModel model;
  KnotGrid grid;
  Eigen::MatrixXd states;    // (N+1) x 2n
  Eigen::MatrixXd controls;  // (N+1) x n
};

struct TrajectorySample {
  Eigen::VectorXd q, qd, qdd, tau;
};

// Barycentric interpolation of states and torques at t in [0, t_f]; the
// acceleration is the forward dynamics of the interpolated values, so knot
// samples reproduce knot data exactly.
TrajectorySample sample(const Trajectory& traj, double t);

class Transcription {
 public:
  Transcription(RobotModel model, CollisionWorld world, Scenario scenario);

  const RobotModel& model() const { return model_; }
  const CollisionWorld& world() const { return world_; }
  const Scenario& scenario() const { return scenario_; }
  int dof() const { return dof_; }
  int order() const { return scenario_.knots; }
  int num_variables() const { return decision_size(dof_, order()); }
  int num_constraints() const;

  // t_f from the scenario guess, positions interpolated linearly in time from
  // start to goal, velocities the spectral derivative of that interpolation,
  // torques the inverse dynamics with zero acceleration. May violate
  // collision constraints.
  Eigen::VectorXd initial_guess() const;

  // J = t_f + mu * sum_j w_j(t_f) * jerk_j' Q jerk_j with Q_kk the inverse
  // squared torque limits and the knot jerk the spectral derivative of the
  // forward-dynamics accelerations.
  double cost(const Eigen::VectorXd& z) const;

  // D*X - (t_f/2)*F, one row per knot; zero iff the interpolant satisfies the
  // collocation conditions.
  Eigen::MatrixXd dynamics_defects(const Eigen::VectorXd& z) const;

  struct ConstraintBlock {
    Eigen::VectorXd values, lower, upper;
  };

  // Per knot, in knot order: q rows against position limits, qd against
  // velocity limits, tau against torque limits, then torque-rate rows when
  // enabled, then collision margins (>= 0). Used for reporting; the NLP
  // encodes the pure box rows as variable bounds instead.
  ConstraintBlock path_constraint_values(const Eigen::VectorXd& z) const;

  // Equality residuals in time order: q(0) - q_start, q(t_f) - q_goal, qd(0),
  // qd(t_f), and with accel_bc the forward-dynamics accelerations at both
  // endpoint knots.
  Eigen::VectorXd boundary_constraint_values(const Eigen::VectorXd& z) const;

  // General constraint rows, in order: defects (row-major), boundary
  // residuals, torque-rate rows (row-major, when enabled), collision margins
  // (knot-major, when the world has any). Box limits on q, qd, tau and the
  // t_f range become variable bounds.
  NLPSpec build_nlp() const;

  Trajectory extract_trajectory(const Eigen::VectorXd& z) const;

  // Scalar-generic evaluation cores backing the NLP callbacks.
  template <typename T>
  T cost_value(const VecX<T>& z) const;
  template <typename T>
  VecX<T> constraint_values(const VecX<T>& z) const;

 private:
  RobotModel model_;
  CollisionWorld world_;
  Scenario scenario_;
  int dof_;
  int collision_rows_;
  Eigen::MatrixXd diff_;      // reference-interval differentiation matrix
  Eigen::VectorXd weights1_;  // Clenshaw-Curtis weights at t_f = 1
  Eigen::VectorXd qdiag_;     // jerk weight diagonal, 1 / tau_max^2
};

}  // namespace spectraj
