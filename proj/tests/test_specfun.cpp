#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include "toralmass/specfun.hpp"

using namespace toral;

namespace {

constexpr double kPi = std::numbers::pi;

using big = boost::multiprecision::cpp_bin_float_100;

// Independent oracle: the ascending power series evaluated in 100-digit
// arithmetic, so the alternating cancellation is harmless for x <= 100.
// nu2 is twice the order, covering integer and half-integer cases.
double series_oracle(int nu2, double x) {
  REQUIRE(x <= 100.0);
  if (x == 0.0) return nu2 == 0 ? 1.0 : 0.0;
  const big half_x = big(x) / 2;
  big gamma_nu1;  // Gamma(nu + 1)
  switch (nu2) {
    case 0: gamma_nu1 = 1; break;
    case 2: gamma_nu1 = 1; break;
    case 4: gamma_nu1 = 2; break;
    case 1: gamma_nu1 = boost::math::constants::root_pi<big>() / 2; break;
    case 3: gamma_nu1 = 3 * boost::math::constants::root_pi<big>() / 4; break;
    default: REQUIRE(false);
  }
  const big nu = big(nu2) / 2;
  big term = pow(half_x, nu) / gamma_nu1;
  big sum = term;
  const big q = half_x * half_x;
  for (int m = 1; m < 500; ++m) {
    term *= -q / (big(m) * (big(m) + nu));
    sum += term;
    if (abs(term) < big(1e-40) * abs(sum)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("integer-order Bessel agrees with the high-precision series") {
  const std::vector<double> xs = {1e-8, 1e-4, 0.01, 0.5,  1.0,  2.0,  5.0,
                                  10.0, 12.0, 14.9, 15.1, 18.0, 25.0, 50.0,
                                  75.0, 99.0};
  for (int order = 0; order <= 2; ++order)
    for (double x : xs)
      CHECK(std::abs(bessel_j(order, x) - series_oracle(2 * order, x)) <=
            1e-13);
}

TEST_CASE("Bessel values against an independent library implementation") {
  const std::vector<double> xs = {1e-6, 0.3, 1.0, 7.5, 14.99, 15.01,
                                  40.0, 123.0, 1000.0, 9999.0};
  for (double x : xs) {
    CHECK(std::abs(bessel_j(0, x) - boost::math::cyl_bessel_j(0.0, x)) <= 1e-12);
    CHECK(std::abs(bessel_j(1, x) - boost::math::cyl_bessel_j(1.0, x)) <= 1e-12);
    CHECK(std::abs(bessel_j(2, x) - boost::math::cyl_bessel_j(2.0, x)) <= 1e-12);
    CHECK(std::abs(bessel_j(0, x, true) - boost::math::cyl_bessel_j(0.5, x)) <= 1e-12);
    CHECK(std::abs(bessel_j(1, x, true) - boost::math::cyl_bessel_j(1.5, x)) <= 1e-12);
  }
}

TEST_CASE("half-order closed forms match the series at the pinned points") {
  for (double x : {0.5, 5.0, 50.0}) {
    CHECK(std::abs(bessel_j(1, x, true) - series_oracle(3, x)) <= 1e-12);
    CHECK(std::abs(bessel_j(0, x, true) - series_oracle(1, x)) <= 1e-12);
  }
}

TEST_CASE("Bessel basics and domain checks") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(bessel_j(2, 0.0) == 0.0);
  CHECK(bessel_j(1, 1e-9) / 1e-9 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(bessel_j(3, 1.0), ValidationError);
  CHECK_THROWS_AS(bessel_j(-1, 1.0), ValidationError);
  CHECK_THROWS_AS(bessel_j(2, 1.0, true), ValidationError);
  CHECK_THROWS_AS(bessel_j(0, -0.5), ValidationError);
}

TEST_CASE("kernel values at zero and domain checks") {
  CHECK(g_kernel(2, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g_kernel(3, 0.0) ==
        doctest::Approx((4.0 * kPi / 3.0) / std::pow(2.0 * kPi, 1.5)).epsilon(1e-15));
  CHECK(h_kernel(2, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(g_kernel(4, 1.0), ValidationError);
  CHECK_THROWS_AS(g_kernel(2, -1.0), ValidationError);
  CHECK_THROWS_AS(h_kernel(1, 1.0), ValidationError);
  CHECK_THROWS_AS(h_kernel(2, -1.0), ValidationError);
}

TEST_CASE("h equals g squared on a log grid") {
  for (int d : {2, 3}) {
    double x = 1e-8;
    while (x <= 1e4) {
      const double g = g_kernel(d, x);
      CHECK(std::abs(h_kernel(d, x) - g * g) <= 1e-12);
      CHECK(h_kernel(d, x) >= 0.0);
      x *= 1.37;
    }
  }
}

TEST_CASE("kernels against their defining Bessel expressions") {
  for (double x : {0.01, 0.2, 0.7, 1.3, 4.0, 10.0, 55.5}) {
    const double y = 2.0 * kPi * x;
    CHECK(g_kernel(2, x) ==
          doctest::Approx(boost::math::cyl_bessel_j(1.0, y) / y).epsilon(1e-12));
    CHECK(g_kernel(3, x) ==
          doctest::Approx(boost::math::cyl_bessel_j(1.5, y) / std::pow(y, 1.5))
              .epsilon(1e-12));
  }
}

TEST_CASE("kernel decay bounds") {
  for (double x = 1.0; x <= 1e4; x *= 1.9) {
    CHECK(std::abs(g_kernel(2, x)) * std::pow(x, 1.5) <= 0.06);
  }
  for (double x = 1e-3; x <= 1e3; x *= 1.31) {
    CHECK(std::abs(g2_derivative(x)) * std::pow(1.0 + x, 1.5) <= 2.0);
  }
}

TEST_CASE("derivative matches the finite difference") {
  // absolute floor handles the zeros of the derivative on the grid
  const double h = 1e-6;
  for (double x = 0.01; x <= 100.0; x *= 1.171) {
    const double fd = (g_kernel(2, x + h) - g_kernel(2, x - h)) / (2.0 * h);
    const double exact = g2_derivative(x);
    CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact) + 1e-9);
  }
  CHECK(std::abs(g2_derivative(1e-8)) <= 1e-6);
  CHECK_THROWS_AS(g2_derivative(0.0), ValidationError);
}

TEST_CASE("quadrature basics") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  CHECK(integrate([](double) { return 1.0; }, 0.0, 1.0, spec) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate([](double s) { return s * s; }, 0.0, 2.0, spec) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0, spec) == 0.0);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0, spec),
                  ValidationError);
}

TEST_CASE("kernel integral identities with certified tails") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-9;

  // |J_1(y)| <= sqrt(2/(pi y)) gives h2(s) <= (2/pi) (2 pi s)^-3, whose tail
  // integral from A is (2 pi)^-3 / (pi A^2).
  const double int_h2 = integrate_to_infinity(
      [](double s) { return h_kernel(2, s); }, 0.0, spec,
      [](double a) { return std::pow(2.0 * kPi, -3.0) / (kPi * a * a); });
  CHECK(std::abs(int_h2 - 2.0 / (3.0 * kPi * kPi)) <= 1e-8);

  // (sin y / y - cos y)^2 <= (1 + 1/y)^2 <= 4 for y >= 1 gives
  // s h3(s) <= (8/pi) (2 pi)^-4 s^-3, tail (4/pi) (2 pi)^-4 / A^2.
  const double int_sh3 = integrate_to_infinity(
      [](double s) { return s * h_kernel(3, s); }, 0.0, spec,
      [](double a) { return 4.0 / kPi * std::pow(2.0 * kPi, -4.0) / (a * a); });
  CHECK(std::abs(int_sh3 - std::pow(2.0 * kPi, -3.0)) <= 1e-8);

  // a tail bound that never certifies must raise the budget error
  CHECK_THROWS_AS(integrate_to_infinity([](double s) { return h_kernel(2, s); },
                                        0.0, spec, [](double) { return 1.0; }),
                  BudgetError);
}
