#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cda/pseries.hpp"

namespace testutil {

// Plain recursive adaptive Simpson; deliberately independent of the library's
// quadrature so it can serve as an oracle.
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-11, int depth = 48) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Independent evaluation of the first-order correction constant for the
// standard normal:
//   beta1 = -(1/2pi) integral over R of Re log(2 (1 - e^{-l^2/2}) / l^2) / l^2.
// Small lambda by series (the integrand is -1/4 + l^2/96 + O(l^6)), the body
// by adaptive Simpson with expm1, the far tail (where e^{-l^2/2} underflows)
// in closed form.
inline double gaussian_beta1_oracle() {
  const double a = 0.1, cut = 30.0;
  double head = -a / 4.0 + a * a * a / 288.0;
  auto body = [](double l) {
    double u = -std::expm1(-0.5 * l * l);
    return std::log(2.0 * u / (l * l)) / (l * l);
  };
  double mid = adaptive_simpson(body, a, cut, 1e-12);
  double tail = (std::log(2.0) - 2.0 * std::log(cut) - 2.0) / cut;
  const double pi = 3.14159265358979323846;
  return -(head + mid + tail) / pi;
}

inline cda::Series<cda::Rational> random_rational_series(std::mt19937_64& gen, int order,
                                                         const std::string& label,
                                                         bool unit_constant = false) {
  std::uniform_int_distribution<long long> num(-6, 6);
  std::uniform_int_distribution<long long> den(1, 4);
  cda::Series<cda::Rational> s(order, label);
  for (int k = 0; k <= order; ++k) s.set(k, cda::Rational(num(gen), den(gen)));
  if (unit_constant) s.set(0, cda::Rational(1));
  return s;
}

}  // namespace testutil
