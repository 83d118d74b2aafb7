#pragma once

#include <Eigen/Core>

namespace spectraj {

// Chebyshev-Lobatto collocation grid on [0, t_f].
//
// Knots follow T_i = (t_f/2)(cos(i*pi/N) + 1), so the sequence is strictly
// decreasing: T_0 = t_f down to T_N = 0. All stacked per-knot arrays in this
// library index knots in that order. Knots are computed through a sine
// identity so the symmetry T_i + T_{N-i} = t_f holds exactly in floating
// point.
class KnotGrid {
 public:
  KnotGrid(int order, double horizon);

  int order() const { return order_; }          // N; the grid has N+1 knots
  int size() const { return order_ + 1; }
  double horizon() const { return horizon_; }   // t_f

  // Physical-time knots, descending from t_f to 0.
  const Eigen::VectorXd& knots() const { return knots_; }
  // Reference-interval abscissae s_i = cos(i*pi/N) in [-1, 1].
  const Eigen::VectorXd& reference_points() const { return reference_; }
  // Barycentric weights; any common scaling is immaterial.
  const Eigen::VectorXd& bary_weights() const { return bary_; }

 private:
  int order_;
  double horizon_;
  Eigen::VectorXd knots_;
  Eigen::VectorXd reference_;
  Eigen::VectorXd bary_;
};

// Factory matching the knot definition above. Throws std::invalid_argument
// for order < 1 or horizon <= 0.
KnotGrid chebyshev_knots(int order, double horizon);

// Spectral differentiation matrix on the reference interval. For samples V
// of a degree <= N polynomial at the knots, (2/t_f) * D * V is the exact
// physical-time derivative at the knots. Built from barycentric weights with
// the negated-row-sum diagonal.
Eigen::MatrixXd diff_matrix(const KnotGrid& grid);

// Clenshaw-Curtis weights w_j > 0 with sum(w) = t_f; sum_j w_j f(T_j)
// integrates polynomials of degree <= N exactly over [0, t_f].
Eigen::VectorXd clenshaw_curtis_weights(const KnotGrid& grid);

// Barycentric evaluation of the interpolant of per-knot samples at time t in
// [0, t_f]. Reproduces samples exactly when t hits a knot. The matrix form
// interpolates each column independently (rows are knots).
double barycentric_eval(const KnotGrid& grid, const Eigen::VectorXd& values, double t);
Eigen::VectorXd barycentric_eval(const KnotGrid& grid, const Eigen::MatrixXd& values, double t);

}  // namespace spectraj
