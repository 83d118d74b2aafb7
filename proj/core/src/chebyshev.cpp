#include "spectraj/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

namespace spectraj {

KnotGrid::KnotGrid(int order, double horizon) : order_(order), horizon_(horizon) {
  if (order < 1) throw std::invalid_argument("KnotGrid: order must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("KnotGrid: horizon must be > 0");

  const int n = order + 1;
  knots_.resize(n);
  reference_.resize(n);
  bary_.resize(n);

  for (int i = 0; 2 * i <= order; ++i) {
    // cos(i*pi/N) evaluated as sin(pi*(N-2i)/(2N)) for the upper half-grid;
    // the lower half mirrors it through t_f, which keeps T_i + T_{N-i} = t_f
    // exact in floating point (the subtraction below is exact by Sterbenz).
    const double s = std::sin(M_PI * (order - 2 * i) / (2.0 * order));
    reference_(i) = s;
    knots_(i) = 0.5 * horizon * (s + 1.0);
    if (i != order - i) {
      reference_(order - i) = -s;
      knots_(order - i) = horizon - knots_(i);
    }
  }
  for (int i = 0; i <= order; ++i)
    bary_(i) = (i % 2 == 0 ? 1.0 : -1.0) * (i == 0 || i == order ? 0.5 : 1.0);
}

KnotGrid chebyshev_knots(int order, double horizon) { return KnotGrid(order, horizon); }

Eigen::MatrixXd diff_matrix(const KnotGrid& grid) {
  const int n = grid.size();
  const Eigen::VectorXd& x = grid.reference_points();
  const Eigen::VectorXd& w = grid.bary_weights();

  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d(i, j) = (w(j) / w(i)) / (x(i) - x(j));
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

Eigen::VectorXd clenshaw_curtis_weights(const KnotGrid& grid) {
  const int order = grid.order();
  const int n = order + 1;
  Eigen::VectorXd w(n);

  if (order == 1) {
    w.setConstant(0.5 * grid.horizon());
    return w;
  }

  // Cosine-series evaluation of int l_j(s) ds over [-1, 1] (Clenshaw-Curtis),
  // then the linear map to [0, t_f]. Interior weights:
  //   w_j = (2/N) * (1 - sum_k 2 cos(2 k theta_j)/(4k^2-1) - last term),
  // endpoint weights 1/(N^2-1) for even N, 1/N^2 for odd N.
  const bool even = order % 2 == 0;
  w(0) = even ? 1.0 / (order * order - 1.0) : 1.0 / (order * order);
  w(order) = w(0);
  for (int j = 1; j < order; ++j) {
    const double theta = M_PI * j / order;
    double v = 1.0;
    const int half = even ? order / 2 - 1 : (order - 1) / 2;
    for (int k = 1; k <= half; ++k)
      v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    if (even) v -= std::cos(order * theta) / (order * order - 1.0);
    w(j) = 2.0 * v / order;
  }

  w *= 0.5 * grid.horizon();

  // Mirror so w_j == w_{N-j} exactly.
  for (int j = 0; 2 * j < order; ++j) {
    const double avg = 0.5 * (w(j) + w(order - j));
    w(j) = avg;
    w(order - j) = avg;
  }
  return w;
}

namespace {

void check_domain(const KnotGrid& grid, double t) {
  if (!(t >= 0.0 && t <= grid.horizon()))
    throw std::invalid_argument("barycentric_eval: t outside [0, t_f]");
}

}  // namespace

Eigen::VectorXd barycentric_eval(const KnotGrid& grid, const Eigen::MatrixXd& values, double t) {
  check_domain(grid, t);
  if (values.rows() != grid.size())
    throw std::invalid_argument("barycentric_eval: values must have one row per knot");

  const Eigen::VectorXd& knots = grid.knots();
  const Eigen::VectorXd& w = grid.bary_weights();

  for (int i = 0; i < grid.size(); ++i)
    if (t == knots(i)) return values.row(i);

  Eigen::VectorXd num = Eigen::VectorXd::Zero(values.cols());
  double den = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double c = w(i) / (t - knots(i));
    num += c * values.row(i).transpose();
    den += c;
  }
  return num / den;
}

double barycentric_eval(const KnotGrid& grid, const Eigen::VectorXd& values, double t) {
  return barycentric_eval(grid, Eigen::MatrixXd(values), t)(0);
}

}  // namespace spectraj
