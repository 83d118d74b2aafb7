#include "spectraj/autodiff.hpp"

namespace spectraj {

Eigen::MatrixXd jacobian(const DifferentiableFunction& f, const Eigen::VectorXd& z,
                         Eigen::VectorXd* value) {
  const int n = f.input_dim();
  const int m = f.output_dim();
  if (z.size() != n) throw std::invalid_argument("jacobian: input size mismatch");

  Eigen::MatrixXd jac(m, n);
  VecX<Dual8> x(n);
  VecX<Dual8> y(m);
  for (int i = 0; i < n; ++i) x(i) = Dual8(z(i));

  for (int start = 0; start < n; start += kTangentWidth) {
    const int batch = std::min(kTangentWidth, n - start);
    for (int k = 0; k < batch; ++k) x(start + k).v(k) = 1.0;
    f.evaluate(x, y);
    if (y.size() != m) throw std::invalid_argument("jacobian: output size mismatch");
    for (int r = 0; r < m; ++r) {
      if (!isfinite(y(r))) throw EvalError(r);
      for (int k = 0; k < batch; ++k) jac(r, start + k) = y(r).v(k);
    }
    if (value != nullptr && start == 0) {
      value->resize(m);
      for (int r = 0; r < m; ++r) (*value)(r) = y(r).a;
    }
    for (int k = 0; k < batch; ++k) x(start + k).v(k) = 0.0;
  }

  if (n == 0 && value != nullptr) {
    VecX<double> y0(m);
    f.evaluate(z, y0);
    *value = y0;
  }
  return jac;
}

Eigen::VectorXd gradient(const DifferentiableFunction& f, const Eigen::VectorXd& z,
                         double* value) {
  if (f.output_dim() != 1) throw std::invalid_argument("gradient: function is not scalar-valued");
  Eigen::VectorXd y;
  const Eigen::MatrixXd jac = jacobian(f, z, &y);
  if (value != nullptr) *value = y(0);
  return jac.row(0).transpose();
}

}  // namespace spectraj
