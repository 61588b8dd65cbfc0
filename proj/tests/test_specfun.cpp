#include <gtest/gtest.h>

#include <cmath>

#include "weilrep/specfun.hpp"

using namespace weilrep;

namespace {

const double kSqrtPi = std::sqrt(M_PI);

// Gamma(n + 1/2, x) by the recurrence from Gamma(1/2, x) = sqrt(pi) erfc(sqrt x)
double gamma_half_integer(int n, double x) {
  double g = kSqrtPi * std::erfc(std::sqrt(x));
  double s = 0.5;
  for (int i = 0; i < n; ++i, s += 1)
    g = s * g + std::pow(x, s) * std::exp(-x);
  return g;
}

// trapezoid rule after y = e^u; the integrand decays double exponentially
// at both ends, so the plain rule converges fast
double v_trapezoid(double kappa, double a, double b) {
  const double h = 1.0 / 64;
  long double sum = 0;
  for (double u = -40; u <= 40; u += h) {
    const double y = std::exp(u);
    const double x = a * a * y;
    const double g = x == 0 ? std::tgamma(kappa - 1) : boost::math::tgamma(kappa - 1, x);
    const double w = -b * b * y - 1 / y - 0.5 * u;
    if (w < -700)
      continue;
    sum += static_cast<long double>(g) * std::exp(static_cast<long double>(w));
  }
  return static_cast<double>(sum * h);
}

} // namespace

TEST(Specfun, IncompleteGamma) {
  for (double x : {0.0, 0.3, 1.0, 4.5, 20.0})
    EXPECT_NEAR(inc_gamma_upper(1, x), std::exp(-x), 1e-15);
  EXPECT_NEAR(inc_gamma_upper(2, 0), 1.0, 1e-15);
  for (int n = 0; n < 4; ++n)
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
      const double want = gamma_half_integer(n, x);
      EXPECT_NEAR(inc_gamma_upper(n + 0.5, x), want, 1e-13 * std::max(1.0, want)) << n << " " << x;
    }
  EXPECT_THROW(inc_gamma_upper(0, 1), precondition_error);
  EXPECT_THROW(inc_gamma_upper(1, -1), precondition_error);
}

TEST(Specfun, VAtOrigin) {
  for (double kappa : {1.5, 2.0, 2.5, 4.0}) {
    const double want = std::tgamma(kappa - 1) * kSqrtPi;
    const QuadratureResult r = V_kappa(kappa, 0, 0);
    EXPECT_NEAR(r.value, want, 1e-10 * want) << kappa;
    EXPECT_GT(r.evaluations, 0);
  }
}

TEST(Specfun, VAlongTheBAxis) {
  // a = 0: int e^{-b^2 y - 1/y} y^{-3/2} dy = sqrt(pi) e^{-2|b|}
  for (double kappa : {1.5, 3.0})
    for (double b : {0.25, 1.0, 2.0, 5.0, 10.0}) {
      const double want = std::tgamma(kappa - 1) * kSqrtPi * std::exp(-2 * b);
      EXPECT_NEAR(V_kappa(kappa, 0, b).value, want, 1e-10 * want) << kappa << " " << b;
    }
}

TEST(Specfun, VAgainstTrapezoid) {
  for (double kappa : {1.5, 2.5, 4.0})
    for (double a : {0.5, 1.0, 3.0})
      for (double b : {0.0, 0.5, 2.0}) {
        const double want = v_trapezoid(kappa, a, b);
        EXPECT_NEAR(V_kappa(kappa, a, b).value, want, 1e-9 * want) << kappa << " " << a << " " << b;
      }
  // reference values from an arbitrary-precision quadrature
  EXPECT_NEAR(V_kappa(2.5, 1, 0.5).value, 0.249706362996843, 1e-12);
  EXPECT_NEAR(V_kappa(2.5, 10, 10).value, 2.60673930275663e-12, 1e-22);
}

TEST(Specfun, SymmetryAndDomination) {
  const double kappa = 2.5;
  const double top = V_kappa(kappa, 0, 0).value;
  std::vector<std::vector<double>> grid(21, std::vector<double>(21));
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j)
      grid[i][j] = V_kappa(kappa, -5 + 0.5 * i, -5 + 0.5 * j).value;
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j) {
      const double v = grid[i][j];
      EXPECT_GT(v, 0);
      EXPECT_LE(v, top * (1 + 1e-12));
      EXPECT_DOUBLE_EQ(v, grid[20 - i][j]);
      EXPECT_DOUBLE_EQ(v, grid[i][20 - j]);
      // decreasing in |a| and |b| away from the centre
      if (i > 10) {
        EXPECT_LE(v, grid[i - 1][j] * (1 + 1e-12));
      }
      if (j > 10) {
        EXPECT_LE(v, grid[i][j - 1] * (1 + 1e-12));
      }
      // Gamma(kappa - 1, .) <= Gamma(kappa - 1) bounds V by the a = 0 value
      const double b = -5 + 0.5 * j;
      EXPECT_LE(v, top * std::exp(-2 * std::abs(b)) * (1 + 1e-10));
    }
}

TEST(Specfun, Preconditions) {
  EXPECT_THROW(V_kappa(1.0, 0, 0), precondition_error);
  EXPECT_THROW(V_kappa(0.5, 1, 1), precondition_error);
  EXPECT_THROW(V_kappa(2.0, NAN, 0), precondition_error);
}
