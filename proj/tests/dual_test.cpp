#include "spectraj/dual.hpp"

#include <gtest/gtest.h>

#include <Eigen/Core>
#include <cmath>

namespace {

using D4 = spectraj::Dual<4>;

D4 seed(double value, int direction) { return D4(value, direction); }

TEST(DualTest, ArithmeticPropagatesTangents) {
  const D4 x = seed(2.0, 0);
  const D4 y = seed(3.0, 1);

  const D4 sum = x + y;
  EXPECT_DOUBLE_EQ(sum.a, 5.0);
  EXPECT_DOUBLE_EQ(sum.v(0), 1.0);
  EXPECT_DOUBLE_EQ(sum.v(1), 1.0);

  const D4 prod = x * y;
  EXPECT_DOUBLE_EQ(prod.a, 6.0);
  EXPECT_DOUBLE_EQ(prod.v(0), 3.0);  // d(xy)/dx = y
  EXPECT_DOUBLE_EQ(prod.v(1), 2.0);  // d(xy)/dy = x

  const D4 quot = x / y;
  EXPECT_DOUBLE_EQ(quot.a, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(quot.v(0), 1.0 / 3.0);        // 1/y
  EXPECT_DOUBLE_EQ(quot.v(1), -2.0 / 9.0);       // -x/y^2

  const D4 diff = 1.0 - x;
  EXPECT_DOUBLE_EQ(diff.a, -1.0);
  EXPECT_DOUBLE_EQ(diff.v(0), -1.0);
}

TEST(DualTest, ChainRuleThroughElementaryFunctions) {
  const double t = 0.7;
  const D4 x = seed(t, 0);

  using spectraj::cos;
  using spectraj::exp;
  using spectraj::log;
  using spectraj::sin;
  using spectraj::sqrt;
  using spectraj::tanh;

  EXPECT_DOUBLE_EQ(sin(x).v(0), std::cos(t));
  EXPECT_DOUBLE_EQ(cos(x).v(0), -std::sin(t));
  EXPECT_DOUBLE_EQ(exp(x).v(0), std::exp(t));
  EXPECT_DOUBLE_EQ(log(x).v(0), 1.0 / t);
  EXPECT_DOUBLE_EQ(sqrt(x).v(0), 0.5 / std::sqrt(t));
  const double th = std::tanh(t);
  EXPECT_DOUBLE_EQ(tanh(x).v(0), 1.0 - th * th);

  // Composite: d/dt exp(sin(t)^2) = exp(sin^2) * 2 sin cos.
  const D4 comp = exp(sin(x) * sin(x));
  EXPECT_NEAR(comp.v(0), std::exp(std::sin(t) * std::sin(t)) * 2.0 * std::sin(t) * std::cos(t),
              1e-15);
}

TEST(DualTest, ComparisonsUseValuePartOnly) {
  const D4 x = seed(1.0, 0);
  const D4 y = seed(2.0, 1);
  EXPECT_TRUE(x < y);
  EXPECT_TRUE(y > x);
  EXPECT_TRUE(x < 1.5);
  EXPECT_FALSE(x > 1.0);
  EXPECT_TRUE(x == D4(1.0, 3));  // equal values, different tangents

  using spectraj::abs;
  using spectraj::fmax;
  const D4 neg = seed(-2.0, 0);
  EXPECT_DOUBLE_EQ(abs(neg).a, 2.0);
  EXPECT_DOUBLE_EQ(abs(neg).v(0), -1.0);  // slope of |x| on the negative side
  EXPECT_DOUBLE_EQ(fmax(x, y).v(1), 1.0);
}

TEST(DualTest, MixedDoubleDualEigenExpressions) {
  Eigen::Matrix2d a;
  a << 2.0, 1.0, 0.0, 3.0;
  Eigen::Matrix<D4, 2, 1> x;
  x(0) = seed(1.0, 0);
  x(1) = seed(2.0, 1);

  const Eigen::Matrix<D4, 2, 1> y = a * x;
  EXPECT_DOUBLE_EQ(y(0).a, 4.0);
  EXPECT_DOUBLE_EQ(y(1).a, 6.0);
  EXPECT_DOUBLE_EQ(y(0).v(0), 2.0);
  EXPECT_DOUBLE_EQ(y(0).v(1), 1.0);
  EXPECT_DOUBLE_EQ(y(1).v(0), 0.0);
  EXPECT_DOUBLE_EQ(y(1).v(1), 3.0);

  const D4 dot = x.dot(x);
  EXPECT_DOUBLE_EQ(dot.a, 5.0);
  EXPECT_DOUBLE_EQ(dot.v(0), 2.0);
  EXPECT_DOUBLE_EQ(dot.v(1), 4.0);
}

TEST(DualTest, FiniteDetection) {
  using spectraj::isfinite;
  D4 x = seed(1.0, 0);
  EXPECT_TRUE(isfinite(x));
  x.a = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(isfinite(x));
  x.a = 1.0;
  x.v(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(isfinite(x));
}

TEST(DualTest, ValueExtraction) {
  EXPECT_DOUBLE_EQ(spectraj::value_of(2.5), 2.5);
  EXPECT_DOUBLE_EQ(spectraj::value_of(seed(-1.25, 0)), -1.25);
}

}  // namespace
