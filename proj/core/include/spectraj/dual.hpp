#pragma once

#include <Eigen/Core>
#include <cmath>
#include <ostream>

namespace spectraj {

// Forward-mode dual number carrying a fixed-width batch of directional
// derivatives alongside the value. Arithmetic propagates tangents by the
// chain rule; comparisons act on the value part only, so branchy code
// (abs, clamping, pivot selection) behaves identically to plain doubles.
template <int K>
struct Dual {
  using Tangent = Eigen::Matrix<double, K, 1>;

  double a = 0.0;  // value
  Tangent v = Tangent::Zero();

  Dual() = default;
  Dual(double value) : a(value) {}  // NOLINT: implicit promotion intended
  Dual(double value, int direction) : a(value) { v(direction) = 1.0; }
  Dual(double value, const Tangent& tangent) : a(value), v(tangent) {}

  Dual& operator+=(const Dual& r) { a += r.a; v += r.v; return *this; }
  Dual& operator-=(const Dual& r) { a -= r.a; v -= r.v; return *this; }
  Dual& operator*=(const Dual& r) { return *this = *this * r; }
  Dual& operator/=(const Dual& r) { return *this = *this / r; }

  friend Dual operator-(const Dual& x) { return {-x.a, (-x.v).eval()}; }
  friend const Dual& operator+(const Dual& x) { return x; }

  friend Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, (x.v + y.v).eval()}; }
  friend Dual operator+(const Dual& x, double s) { return {x.a + s, x.v}; }
  friend Dual operator+(double s, const Dual& x) { return {s + x.a, x.v}; }

  friend Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, (x.v - y.v).eval()}; }
  friend Dual operator-(const Dual& x, double s) { return {x.a - s, x.v}; }
  friend Dual operator-(double s, const Dual& x) { return {s - x.a, (-x.v).eval()}; }

  friend Dual operator*(const Dual& x, const Dual& y) {
    return {x.a * y.a, (y.a * x.v + x.a * y.v).eval()};
  }
  friend Dual operator*(const Dual& x, double s) { return {x.a * s, (s * x.v).eval()}; }
  friend Dual operator*(double s, const Dual& x) { return {s * x.a, (s * x.v).eval()}; }

  friend Dual operator/(const Dual& x, const Dual& y) {
    const double inv = 1.0 / y.a;
    const double q = x.a * inv;
    return {q, (inv * (x.v - q * y.v)).eval()};
  }
  friend Dual operator/(const Dual& x, double s) { return {x.a / s, (x.v / s).eval()}; }
  friend Dual operator/(double s, const Dual& x) {
    const double inv = 1.0 / x.a;
    const double q = s * inv;
    return {q, (-q * inv * x.v).eval()};
  }

  friend bool operator<(const Dual& x, const Dual& y) { return x.a < y.a; }
  friend bool operator>(const Dual& x, const Dual& y) { return x.a > y.a; }
  friend bool operator<=(const Dual& x, const Dual& y) { return x.a <= y.a; }
  friend bool operator>=(const Dual& x, const Dual& y) { return x.a >= y.a; }
  friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a; }
  friend bool operator!=(const Dual& x, const Dual& y) { return x.a != y.a; }
  friend bool operator<(const Dual& x, double s) { return x.a < s; }
  friend bool operator>(const Dual& x, double s) { return x.a > s; }
  friend bool operator<(double s, const Dual& x) { return s < x.a; }
  friend bool operator>(double s, const Dual& x) { return s > x.a; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& x) {
    return os << x.a << " + [" << x.v.transpose() << "]eps";
  }
};

template <int K>
Dual<K> sin(const Dual<K>& x) {
  return {std::sin(x.a), (std::cos(x.a) * x.v).eval()};
}

template <int K>
Dual<K> cos(const Dual<K>& x) {
  return {std::cos(x.a), (-std::sin(x.a) * x.v).eval()};
}

template <int K>
Dual<K> tan(const Dual<K>& x) {
  const double t = std::tan(x.a);
  return {t, ((1.0 + t * t) * x.v).eval()};
}

template <int K>
Dual<K> tanh(const Dual<K>& x) {
  const double t = std::tanh(x.a);
  return {t, ((1.0 - t * t) * x.v).eval()};
}

template <int K>
Dual<K> exp(const Dual<K>& x) {
  const double e = std::exp(x.a);
  return {e, (e * x.v).eval()};
}

template <int K>
Dual<K> log(const Dual<K>& x) {
  return {std::log(x.a), (x.v / x.a).eval()};
}

template <int K>
Dual<K> sqrt(const Dual<K>& x) {
  const double s = std::sqrt(x.a);
  return {s, (x.v / (2.0 * s)).eval()};
}

template <int K>
Dual<K> abs(const Dual<K>& x) {
  return x.a < 0.0 ? -x : x;
}

template <int K>
Dual<K> atan2(const Dual<K>& y, const Dual<K>& x) {
  const double d = x.a * x.a + y.a * y.a;
  return {std::atan2(y.a, x.a), ((x.a * y.v - y.a * x.v) / d).eval()};
}

template <int K>
Dual<K> pow(const Dual<K>& x, double p) {
  const double f = std::pow(x.a, p);
  return {f, (p * std::pow(x.a, p - 1.0) * x.v).eval()};
}

template <int K>
Dual<K> fmax(const Dual<K>& x, const Dual<K>& y) { return x.a < y.a ? y : x; }

template <int K>
Dual<K> fmin(const Dual<K>& x, const Dual<K>& y) { return y.a < x.a ? y : x; }

template <int K>
bool isfinite(const Dual<K>& x) {
  if (!std::isfinite(x.a)) return false;
  for (int i = 0; i < K; ++i)
    if (!std::isfinite(x.v(i))) return false;
  return true;
}

// Value extraction usable in scalar-generic code.
inline double value_of(double x) { return x; }
template <int K>
double value_of(const Dual<K>& x) { return x.a; }

}  // namespace spectraj

namespace Eigen {

// Traits so Eigen dense objects can hold Dual scalars.
template <int K>
struct NumTraits<spectraj::Dual<K>> : NumTraits<double> {
  using Real = spectraj::Dual<K>;
  using NonInteger = spectraj::Dual<K>;
  using Nested = spectraj::Dual<K>;
  using Literal = double;

  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real highest() { return Real(NumTraits<double>::highest()); }
  static inline Real lowest() { return Real(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    ReadCost = 1 + K,
    AddCost = 1 + K,
    MulCost = 3 + 2 * K,
    RequireInitialization = 1,
  };
};

// Allow mixed double/Dual expressions (e.g. a double matrix times a Dual
// vector) without explicit casts.
template <int K, typename BinaryOp>
struct ScalarBinaryOpTraits<spectraj::Dual<K>, double, BinaryOp> {
  using ReturnType = spectraj::Dual<K>;
};
template <int K, typename BinaryOp>
struct ScalarBinaryOpTraits<double, spectraj::Dual<K>, BinaryOp> {
  using ReturnType = spectraj::Dual<K>;
};

}  // namespace Eigen
