#include "spectraj/transcription.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spectraj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collision margins are only enforced at the knots, so the interpolant can
// shave a few millimetres into an obstacle between them. Planning against
// this pad keeps densely sampled margins positive; the validator still
// checks the true geometry.
constexpr double kCollisionPad = 0.02;  // [m]

template <typename T>
struct Knotted {
  T tf;
  MatX<T> x;  // (N+1) x 2n
  MatX<T> u;  // (N+1) x n
};

template <typename T>
Knotted<T> split(const VecX<T>& z, int dof, int order) {
  const int size = order + 1;
  if (z.size() != decision_size(dof, order))
    throw std::invalid_argument("decision vector has wrong length");
  Knotted<T> d;
  d.tf = z(0);
  if (!(value_of(d.tf) > 0.0))
    throw std::invalid_argument("decision vector requires t_f > 0");
  d.x.resize(size, 2 * dof);
  d.u.resize(size, dof);
  int idx = 1;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < 2 * dof; ++j) d.x(i, j) = z(idx++);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < dof; ++j) d.u(i, j) = z(idx++);
  return d;
}

template <typename T>
VecX<T> knot_row(const MatX<T>& m, int i, int begin, int len) {
  VecX<T> v(len);
  for (int k = 0; k < len; ++k) v(k) = m(i, begin + k);
  return v;
}

}  // namespace

void Scenario::validate(const RobotModel& model) const {
  const int n = model.dof();
  if (q_start.size() != n || q_goal.size() != n)
    throw std::invalid_argument("scenario: start/goal dimension does not match the model");
  if (!q_start.allFinite() || !q_goal.allFinite())
    throw std::invalid_argument("scenario: start/goal must be finite");
  for (int k = 0; k < n; ++k) {
    if (q_start(k) < model.q_min(k) || q_start(k) > model.q_max(k))
      throw std::invalid_argument("scenario: start position outside limits (joint " +
                                  std::to_string(k + 1) + ")");
    if (q_goal(k) < model.q_min(k) || q_goal(k) > model.q_max(k))
      throw std::invalid_argument("scenario: goal position outside limits (joint " +
                                  std::to_string(k + 1) + ")");
  }
  if (!(tf_min > 0.0) || !(tf_min <= tf_max))
    throw std::invalid_argument("scenario: need 0 < tf_min <= tf_max");
  if (!(tf_guess > 0.0)) throw std::invalid_argument("scenario: tf_guess must be positive");
  if (mu < 0.0) throw std::invalid_argument("scenario: mu must be nonnegative");
  if (knots < 3) throw std::invalid_argument("scenario: need at least N = 3");
}

int decision_size(int dof, int order) { return 1 + (order + 1) * 3 * dof; }

Eigen::VectorXd pack(const DecisionVector& d) {
  const int size = static_cast<int>(d.states.rows());
  const int dof = static_cast<int>(d.controls.cols());
  if (d.states.cols() != 2 * dof || d.controls.rows() != size)
    throw std::invalid_argument("pack: inconsistent state/control shapes");
  Eigen::VectorXd z(decision_size(dof, size - 1));
  z(0) = d.tf;
  int idx = 1;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < 2 * dof; ++j) z(idx++) = d.states(i, j);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < dof; ++j) z(idx++) = d.controls(i, j);
  return z;
}

DecisionVector unpack(const Eigen::VectorXd& z, int dof, int order) {
  const Knotted<double> d = split(z, dof, order);
  return DecisionVector{d.tf, d.x, d.u};
}

TrajectorySample sample(const Trajectory& traj, double t) {
  const int n = traj.model.dof();
  TrajectorySample s;
  s.q = barycentric_eval(traj.grid, Eigen::MatrixXd(traj.states.leftCols(n)), t);
  s.qd = barycentric_eval(traj.grid, Eigen::MatrixXd(traj.states.rightCols(n)), t);
  s.tau = barycentric_eval(traj.grid, traj.controls, t);
  s.qdd = forward_dynamics(traj.model, s.q, s.qd, s.tau);
  return s;
}

Transcription::Transcription(RobotModel model, CollisionWorld world, Scenario scenario)
    : model_(std::move(model)), world_(std::move(world)), scenario_(std::move(scenario)) {
  model_.validate();
  world_.validate(model_);
  scenario_.validate(model_);
  dof_ = model_.dof();
  collision_rows_ = collision_constraint_count(world_);
  const KnotGrid unit_grid = chebyshev_knots(scenario_.knots, 1.0);
  diff_ = diff_matrix(unit_grid);
  weights1_ = clenshaw_curtis_weights(unit_grid);
  qdiag_ = model_.tau_max.array().square().inverse();
}

int Transcription::num_constraints() const {
  const int size = order() + 1;
  int rows = 2 * dof_ * size;                       // defects
  rows += (scenario_.accel_bc ? 6 : 4) * dof_;      // boundary residuals
  if (scenario_.enforce_torque_rate) rows += dof_ * size;
  rows += collision_rows_ * size;
  return rows;
}

Eigen::VectorXd Transcription::initial_guess() const {
  const int size = order() + 1;
  const double tf = scenario_.tf_guess;
  const KnotGrid grid = chebyshev_knots(order(), tf);

  DecisionVector d;
  d.tf = tf;
  d.states.resize(size, 2 * dof_);
  d.controls.resize(size, dof_);
  for (int i = 0; i < size; ++i) {
    const double alpha = grid.knots()(i) / tf;
    d.states.row(i).head(dof_) =
        (scenario_.q_start + alpha * (scenario_.q_goal - scenario_.q_start)).transpose();
  }
  d.states.rightCols(dof_) = (2.0 / tf) * (diff_ * d.states.leftCols(dof_));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dof_);
  for (int i = 0; i < size; ++i) {
    const Eigen::VectorXd q = d.states.row(i).head(dof_).transpose();
    const Eigen::VectorXd qd = d.states.row(i).tail(dof_).transpose();
    d.controls.row(i) = inverse_dynamics(model_, q, qd, zero).transpose();
  }
  return pack(d);
}

double Transcription::cost(const Eigen::VectorXd& z) const { return cost_value<double>(z); }

Eigen::MatrixXd Transcription::dynamics_defects(const Eigen::VectorXd& z) const {
  const Knotted<double> d = split(z, dof_, order());
  const int size = order() + 1;
  Eigen::MatrixXd f(size, 2 * dof_);
  for (int i = 0; i < size; ++i) {
    const Eigen::VectorXd x = knot_row(d.x, i, 0, 2 * dof_);
    const Eigen::VectorXd u = knot_row(d.u, i, 0, dof_);
    f.row(i) = state_derivative(model_, x, u).transpose();
  }
  return diff_ * d.x - (0.5 * d.tf) * f;
}

Transcription::ConstraintBlock Transcription::path_constraint_values(
    const Eigen::VectorXd& z) const {
  const Knotted<double> d = split(z, dof_, order());
  const int size = order() + 1;
  const int per_knot =
      3 * dof_ + (scenario_.enforce_torque_rate ? dof_ : 0) + collision_rows_;

  ConstraintBlock block;
  block.values.resize(per_knot * size);
  block.lower.resize(per_knot * size);
  block.upper.resize(per_knot * size);

  const Eigen::MatrixXd rate = (2.0 / d.tf) * (diff_ * d.u);
  int idx = 0;
  for (int i = 0; i < size; ++i) {
    for (int k = 0; k < dof_; ++k, ++idx) {
      block.values(idx) = d.x(i, k);
      block.lower(idx) = model_.q_min(k);
      block.upper(idx) = model_.q_max(k);
    }
    for (int k = 0; k < dof_; ++k, ++idx) {
      block.values(idx) = d.x(i, dof_ + k);
      block.lower(idx) = -model_.qd_max(k);
      block.upper(idx) = model_.qd_max(k);
    }
    for (int k = 0; k < dof_; ++k, ++idx) {
      block.values(idx) = d.u(i, k);
      block.lower(idx) = -model_.tau_max(k);
      block.upper(idx) = model_.tau_max(k);
    }
    if (scenario_.enforce_torque_rate) {
      for (int k = 0; k < dof_; ++k, ++idx) {
        block.values(idx) = rate(i, k);
        block.lower(idx) = -model_.taud_max(k);
        block.upper(idx) = model_.taud_max(k);
      }
    }
    if (collision_rows_ > 0) {
      const Eigen::VectorXd q = knot_row(d.x, i, 0, dof_);
      const Eigen::VectorXd margins = collision_constraint_values(model_, world_, q);
      for (int k = 0; k < collision_rows_; ++k, ++idx) {
        block.values(idx) = margins(k);
        block.lower(idx) = 0.0;
        block.upper(idx) = kInf;
      }
    }
  }
  return block;
}

Eigen::VectorXd Transcription::boundary_constraint_values(const Eigen::VectorXd& z) const {
  const Knotted<double> d = split(z, dof_, order());
  const int last = order();  // knot T_N = 0
  Eigen::VectorXd r((scenario_.accel_bc ? 6 : 4) * dof_);
  int idx = 0;
  for (int k = 0; k < dof_; ++k) r(idx++) = d.x(last, k) - scenario_.q_start(k);
  for (int k = 0; k < dof_; ++k) r(idx++) = d.x(0, k) - scenario_.q_goal(k);
  for (int k = 0; k < dof_; ++k) r(idx++) = d.x(last, dof_ + k);
  for (int k = 0; k < dof_; ++k) r(idx++) = d.x(0, dof_ + k);
  if (scenario_.accel_bc) {
    for (int i : {last, 0}) {
      const Eigen::VectorXd q = knot_row(d.x, i, 0, dof_);
      const Eigen::VectorXd qd = knot_row(d.x, i, dof_, dof_);
      const Eigen::VectorXd u = knot_row(d.u, i, 0, dof_);
      const Eigen::VectorXd qdd = forward_dynamics(model_, q, qd, u);
      for (int k = 0; k < dof_; ++k) r(idx++) = qdd(k);
    }
  }
  return r;
}

template <typename T>
T Transcription::cost_value(const VecX<T>& z) const {
  const Knotted<T> d = split(z, dof_, order());
  T j = d.tf;
  if (scenario_.mu == 0.0) return j;

  const int size = order() + 1;
  MatX<T> qdd(size, dof_);
  for (int i = 0; i < size; ++i) {
    const VecX<T> q = knot_row(d.x, i, 0, dof_);
    const VecX<T> qd = knot_row(d.x, i, dof_, dof_);
    const VecX<T> u = knot_row(d.u, i, 0, dof_);
    qdd.row(i) = forward_dynamics(model_, q, qd, u).transpose();
  }
  const MatX<T> dref = diff_.cast<T>();
  const MatX<T> jerk = (T(2.0) / d.tf) * (dref * qdd);
  T quad = T(0.0);
  for (int i = 0; i < size; ++i) {
    T row = T(0.0);
    for (int k = 0; k < dof_; ++k) row = row + qdiag_(k) * jerk(i, k) * jerk(i, k);
    quad = quad + (weights1_(i) * d.tf) * row;
  }
  return j + scenario_.mu * quad;
}

template <typename T>
VecX<T> Transcription::constraint_values(const VecX<T>& z) const {
  const Knotted<T> d = split(z, dof_, order());
  const int size = order() + 1;
  const int last = order();
  VecX<T> out(num_constraints());
  int idx = 0;

  MatX<T> f(size, 2 * dof_);
  for (int i = 0; i < size; ++i) {
    const VecX<T> x = knot_row(d.x, i, 0, 2 * dof_);
    const VecX<T> u = knot_row(d.u, i, 0, dof_);
    f.row(i) = state_derivative(model_, x, u).transpose();
  }
  const MatX<T> dref = diff_.cast<T>();
  const MatX<T> defects = dref * d.x - (d.tf * T(0.5)) * f;
  for (int i = 0; i < size; ++i)
    for (int c = 0; c < 2 * dof_; ++c) out(idx++) = defects(i, c);

  for (int k = 0; k < dof_; ++k) out(idx++) = d.x(last, k) - scenario_.q_start(k);
  for (int k = 0; k < dof_; ++k) out(idx++) = d.x(0, k) - scenario_.q_goal(k);
  for (int k = 0; k < dof_; ++k) out(idx++) = d.x(last, dof_ + k);
  for (int k = 0; k < dof_; ++k) out(idx++) = d.x(0, dof_ + k);
  if (scenario_.accel_bc) {
    // The defect rows already hold the state derivative; rows last and 0 of f
    // carry the endpoint accelerations.
    for (int i : {last, 0})
      for (int k = 0; k < dof_; ++k) out(idx++) = f(i, dof_ + k);
  }

  if (scenario_.enforce_torque_rate) {
    const MatX<T> rate = (T(2.0) / d.tf) * (dref * d.u);
    for (int i = 0; i < size; ++i)
      for (int k = 0; k < dof_; ++k) out(idx++) = rate(i, k);
  }

  if (collision_rows_ > 0) {
    for (int i = 0; i < size; ++i) {
      const VecX<T> q = knot_row(d.x, i, 0, dof_);
      const VecX<T> margins = collision_constraint_values(model_, world_, q);
      for (int k = 0; k < collision_rows_; ++k) out(idx++) = margins(k);
    }
  }
  return out;
}

NLPSpec Transcription::build_nlp() const {
  NLPSpec spec;
  const int nvar = num_variables();
  const int ncon = num_constraints();
  const int size = order() + 1;
  spec.num_variables = nvar;
  spec.num_constraints = ncon;

  auto self = std::make_shared<const Transcription>(*this);
  spec.objective = make_function(nvar, 1, [self](const auto& z, auto& y) {
    y.resize(1);
    y(0) = self->cost_value(z);
  });
  spec.constraints = make_function(nvar, ncon, [self](const auto& z, auto& y) {
    y = self->constraint_values(z);
  });

  spec.z_lower.setConstant(nvar, -kInf);
  spec.z_upper.setConstant(nvar, kInf);
  spec.z_lower(0) = scenario_.tf_min;
  spec.z_upper(0) = scenario_.tf_max;
  int idx = 1;
  for (int i = 0; i < size; ++i) {
    for (int k = 0; k < dof_; ++k, ++idx) {
      spec.z_lower(idx) = model_.q_min(k);
      spec.z_upper(idx) = model_.q_max(k);
    }
    for (int k = 0; k < dof_; ++k, ++idx) {
      spec.z_lower(idx) = -model_.qd_max(k);
      spec.z_upper(idx) = model_.qd_max(k);
    }
  }
  for (int i = 0; i < size; ++i) {
    for (int k = 0; k < dof_; ++k, ++idx) {
      spec.z_lower(idx) = -model_.tau_max(k);
      spec.z_upper(idx) = model_.tau_max(k);
    }
  }

  spec.c_lower.setConstant(ncon, 0.0);
  spec.c_upper.setConstant(ncon, 0.0);
  int row = 2 * dof_ * size + (scenario_.accel_bc ? 6 : 4) * dof_;
  if (scenario_.enforce_torque_rate) {
    for (int i = 0; i < size; ++i) {
      for (int k = 0; k < dof_; ++k, ++row) {
        spec.c_lower(row) = -model_.taud_max(k);
        spec.c_upper(row) = model_.taud_max(k);
      }
    }
  }
  for (; row < ncon; ++row) {
    spec.c_lower(row) = kCollisionPad;
    spec.c_upper(row) = kInf;
  }
  return spec;
}

Trajectory Transcription::extract_trajectory(const Eigen::VectorXd& z) const {
  const Knotted<double> d = split(z, dof_, order());
  return Trajectory{model_, chebyshev_knots(order(), d.tf), d.x, d.u};
}

template double Transcription::cost_value<double>(const VecX<double>&) const;
template Dual8 Transcription::cost_value<Dual8>(const VecX<Dual8>&) const;
template Eigen::VectorXd Transcription::constraint_values<double>(const VecX<double>&) const;
template VecX<Dual8> Transcription::constraint_values<Dual8>(const VecX<Dual8>&) const;

}  // namespace spectraj
