#pragma once

#include <cmath>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"

namespace weilrep {

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  long evaluations = 0;
};

/// Gamma(s, x) = int_x^oo t^{s-1} e^{-t} dt.
inline double inc_gamma_upper(double s, double x) {
  if (!(s > 0) || !(x >= 0) || !std::isfinite(s) || !std::isfinite(x))
    throw precondition_error("weilrep: inc_gamma_upper needs s > 0, x >= 0");
  if (x == 0)
    return boost::math::tgamma(s);
  return boost::math::tgamma(s, x);
}

/// V_kappa(a, b) = int_0^oo Gamma(kappa-1, a^2 y) e^{-b^2 y - 1/y} y^{-3/2} dy,
/// split at y = 1; the tail is mapped to (0, 1] by y = 1/t.
inline QuadratureResult V_kappa(double kappa, double a, double b,
                                double tolerance = 1e-10) {
  if (!(kappa > 1) || !std::isfinite(kappa) || !std::isfinite(a) || !std::isfinite(b))
    throw precondition_error("weilrep: V_kappa needs kappa > 1 and finite a, b");
  const double s = kappa - 1, a2 = a * a, b2 = b * b;
  long evals = 0;
  auto g = [&](double x) {
    if (!std::isfinite(x))
      return 0.0;
    return x == 0 ? boost::math::tgamma(s) : boost::math::tgamma(s, x);
  };
  auto head = [&](double y) -> double {
    ++evals;
    if (y <= 0)
      return 0.0;
    return g(a2 * y) * std::exp(-b2 * y - 1 / y - 1.5 * std::log(y));
  };
  auto tail = [&](double t) -> double {
    ++evals;
    if (t <= 0)
      return 0.0;
    return g(a2 / t) * std::exp(-b2 / t - t - 0.5 * std::log(t));
  };
  boost::math::quadrature::tanh_sinh<double> rule(15);
  double e1 = 0, e2 = 0, l1 = 0, l2 = 0;
  const double tol = 1e-12;
  const double v1 = rule.integrate(head, 0.0, 1.0, tol, &e1, &l1);
  const double v2 = rule.integrate(tail, 0.0, 1.0, tol, &e2, &l2);
  // boost reports |I_k - I_{k-1}|, an absolute and pessimistic estimate
  QuadratureResult r{v1 + v2, e1 + e2, evals};
  if (!std::isfinite(r.value))
    throw consistency_error("weilrep: V_kappa quadrature diverged");
  if (r.error_estimate > tolerance * std::abs(r.value) && r.value != 0)
    throw consistency_error("weilrep: V_kappa error estimate " + std::to_string(r.error_estimate) +
                            " misses the tolerance");
  return r;
}

} // namespace weilrep
