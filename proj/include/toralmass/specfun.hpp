#pragma once

#include <functional>

#include "toralmass/common.hpp"

namespace toral {

// Bessel function of the first kind for the orders this library needs:
// 0, 1, 2 (integer) and 1/2, 3/2 (half-integer, closed trig forms).
// Absolute error <= 1e-12 for 0 <= x <= 1e4.  Pass half = true to request
// order + 1/2.
double bessel_j(int order, double x, bool half = false);

// Fourier transform of the unit-ball indicator, normalised so that
//   g_d(x) = J_{d/2}(2 pi x) / (2 pi x)^{d/2},
// extended continuously to x = 0 (g_2(0) = 1/2, g_3(0) = (4 pi/3)/(2 pi)^{3/2}).
double g_kernel(int d, double x);

// Squared kernel h_d = g_d^2, evaluated in its direct closed form:
//   h_2(x) = J_1(2 pi x)^2 / (2 pi x)^2
//   h_3(x) = (2/pi) (2 pi x)^{-4} (sin(2 pi x)/(2 pi x) - cos(2 pi x))^2.
double h_kernel(int d, double x);

// d g_2 / dx = -J_2(2 pi x)/x for x > 0; rejects x <= 0 (use the series
// limit g_2'(0) = 0 analytically if needed).
double g2_derivative(double x);

struct QuadratureSpec {
  double abs_tol = 1e-10;
  int max_depth = 18;  // adaptive bisection depth of the Gauss-Kronrod driver
};

// Adaptive quadrature on a finite interval; throws BudgetError when the
// requested tolerance is not certified within max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec);

// Improper integral over [a, oo).  tail_bound(A) must return a certified
// upper bound on the absolute tail integral beyond A; the cutoff is the
// first point of a doubling scan whose certified tail drops below
// abs_tol / 2, and the finite part is then integrated to abs_tol / 2.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureSpec& spec,
                             const std::function<double(double)>& tail_bound);

}  // namespace toral
