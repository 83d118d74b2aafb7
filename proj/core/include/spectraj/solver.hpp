#pragma once

// Primal-dual interior-point solver for dense nonlinear programs
//
//   minimize    f(z)
//   subject to  c_lower <=  c(z)  <= c_upper
//               z_lower <=   z    <= z_upper
//
// Equalities are encoded as equal bounds. All general constraint rows get
// slack variables; equalities are relaxed to a tight two-sided range so a
// single slacked mechanism covers everything. Search directions come from a
// dense symmetric indefinite factorization of the augmented KKT system, the
// Lagrangian Hessian from a damped BFGS update, and globalization from a
// filter line search over (infeasibility, barrier objective) pairs with
// second-order corrections against curved constraint manifolds.

#include <Eigen/Core>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>

#include "spectraj/autodiff.hpp"

namespace spectraj {

struct NLPSpec {
  int num_variables = 0;
  int num_constraints = 0;
  std::shared_ptr<DifferentiableFunction> objective;    // R^n -> R
  std::shared_ptr<DifferentiableFunction> constraints;  // R^n -> R^m, null iff m == 0
  Eigen::VectorXd z_lower, z_upper;  // size n, +-inf for absent bounds
  Eigen::VectorXd c_lower, c_upper;  // size m, equal entries mark equalities

  void validate() const;
};

struct SolverOptions {
  double tolerance = 1e-6;            // unscaled KKT residual target
  int max_iterations = 500;
  double barrier_init = 0.1;
  double barrier_reduction = 0.2;
  double fraction_to_boundary = 0.995;
  double armijo_constant = 1e-4;      // sufficient-decrease constant
  std::ostream* log = nullptr;        // one line per iteration when set
};

enum class SolveStatus {
  kConverged,
  kMaxIterations,
  kLineSearchFailure,
  kInfeasibleDetected,
};

std::string to_string(SolveStatus status);

struct Multipliers {
  Eigen::VectorXd constraint;   // size m, sign convention grad f + A^T y - zl + zu = 0
  Eigen::VectorXd bound_lower;  // size n, >= 0, nonzero only where z_lower is finite
  Eigen::VectorXd bound_upper;  // size n, >= 0, nonzero only where z_upper is finite
};

struct KKTResiduals {
  double stationarity = std::numeric_limits<double>::infinity();
  double feasibility = std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();

  double overall() const { return std::max(stationarity, std::max(feasibility, complementarity)); }
};

struct SolveResult {
  SolveStatus status = SolveStatus::kMaxIterations;
  Eigen::VectorXd z;
  Multipliers multipliers;
  double objective = std::numeric_limits<double>::quiet_NaN();
  KKTResiduals residuals;
  int iterations = 0;
  double wall_time = 0.0;  // [s]
  std::string message;
};

// Infinity-norm KKT residuals of the barrier-free problem at (z, multipliers),
// with the usual multiplier-size rescaling of the stationarity and
// complementarity measures. Equality rows contribute to feasibility and
// stationarity only. The solver uses this exact function as its convergence
// test, so replaying a converged result reproduces the reported numbers.
KKTResiduals kkt_residuals(const NLPSpec& spec, const Eigen::VectorXd& z,
                           const Multipliers& multipliers);

SolveResult solve(const NLPSpec& spec, const Eigen::VectorXd& z0,
                  const SolverOptions& options = {});

}  // namespace spectraj
