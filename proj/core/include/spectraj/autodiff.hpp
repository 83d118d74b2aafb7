#pragma once

// Batched forward-mode differentiation driver. Functions are written once,
// generic over the scalar; Jacobians come from sweeps that seed unit tangent
// directions in batches of kTangentWidth.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "spectraj/dual.hpp"
#include "spectraj/dynamics.hpp"

namespace spectraj {

inline constexpr int kTangentWidth = 8;
using Dual8 = Dual<kTangentWidth>;

// Raised when an evaluation produces a non-finite value; carries the index
// of the first offending output.
struct EvalError : std::runtime_error {
  explicit EvalError(int index)
      : std::runtime_error("non-finite value in differentiated output " + std::to_string(index)),
        output_index(index) {}
  int output_index;
};

// A vector function evaluable with plain reals and with dual numbers. The
// two instantiations must share one code path so the value parts agree
// exactly.
class DifferentiableFunction {
 public:
  virtual ~DifferentiableFunction() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual void evaluate(const VecX<double>& x, VecX<double>& y) const = 0;
  virtual void evaluate(const VecX<Dual8>& x, VecX<Dual8>& y) const = 0;
};

namespace detail {

template <typename F>
class GenericFunction final : public DifferentiableFunction {
 public:
  GenericFunction(int in, int out, F f) : in_(in), out_(out), f_(std::move(f)) {}
  int input_dim() const override { return in_; }
  int output_dim() const override { return out_; }
  void evaluate(const VecX<double>& x, VecX<double>& y) const override { f_(x, y); }
  void evaluate(const VecX<Dual8>& x, VecX<Dual8>& y) const override { f_(x, y); }

 private:
  int in_, out_;
  F f_;
};

}  // namespace detail

// Wraps a generic callable f(x, y) templated over the scalar type.
template <typename F>
std::shared_ptr<DifferentiableFunction> make_function(int input_dim, int output_dim, F f) {
  return std::make_shared<detail::GenericFunction<F>>(input_dim, output_dim, std::move(f));
}

// Dense Jacobian at z; `value` (optional) receives f(z) from the same sweep.
Eigen::MatrixXd jacobian(const DifferentiableFunction& f, const Eigen::VectorXd& z,
                         Eigen::VectorXd* value = nullptr);

// Gradient of a scalar-valued function.
Eigen::VectorXd gradient(const DifferentiableFunction& f, const Eigen::VectorXd& z,
                         double* value = nullptr);

// Solve A x = b for symmetric positive definite A. The dual overload factors
// the value part once and propagates tangents through
// d(A^-1 b) = A^-1 (db - dA * A^-1 b), reusing the factorization.
inline VecX<double> linear_solve_spd(const MatX<double>& a, const VecX<double>& b) {
  return a.llt().solve(b);
}

template <int K>
VecX<Dual<K>> linear_solve_spd(const MatX<Dual<K>>& a, const VecX<Dual<K>>& b) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd a_val(n, n);
  Eigen::VectorXd b_val(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b_val(i) = b(i).a;
    for (Eigen::Index j = 0; j < n; ++j) a_val(i, j) = a(i, j).a;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(a_val);
  const Eigen::VectorXd x_val = llt.solve(b_val);

  VecX<Dual<K>> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i).a = x_val(i);

  Eigen::VectorXd rhs(n);
  for (int k = 0; k < K; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      rhs(i) = b(i).v(k);
      for (Eigen::Index j = 0; j < n; ++j) rhs(i) -= a(i, j).v(k) * x_val(j);
    }
    const Eigen::VectorXd xk = llt.solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i) x(i).v(k) = xk(i);
  }
  return x;
}

}  // namespace spectraj
