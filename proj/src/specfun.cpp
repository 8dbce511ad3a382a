#include "toralmass/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace toral {

namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Ascending series around 0, accumulated in long double so the alternating
// cancellation near the switch point keeps ~1e-14 absolute accuracy.
long double j_series(int nu, long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L;
  for (int k = 1; k <= nu; ++k) term *= x / (2.0L * k);
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::fabs(term) < 1e-24L * (std::fabs(sum) + 1e-30L)) break;
  }
  return sum;
}

// Hankel large-argument expansion, truncated at its smallest term.  At the
// switch point x = 15 the optimal truncation error is below 1e-13 and it
// only improves with x.
long double j_asymptotic(int nu, long double x) {
  const long double mu = 4.0L * nu * nu;
  long double p = 1.0L, q = 0.0L;
  long double term = 1.0L;
  long double prev = 1e30L;
  for (int k = 1; k < 40; ++k) {
    const long double factor =
        (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * k * x);
    term *= factor;
    if (std::fabs(term) > prev) break;  // series started diverging
    prev = std::fabs(term);
    if (k % 2 == 1) {
      q += (k % 4 == 1) ? term : -term;
    } else {
      p += (k % 4 == 2) ? -term : term;
    }
    if (prev < 1e-20L) break;
  }
  const long double omega = x - (0.5L * nu + 0.25L) * kPiL;
  return std::sqrt(2.0L / (kPiL * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

// sin(x)/x - cos(x) via its even series for small x, where the direct
// subtraction loses all leading digits.
long double sinc_minus_cos(long double x) {
  if (std::fabs(x) < 0.5L) {
    const long double q = x * x;
    long double term = q / 3.0L;  // m=1: 2m x^{2m}/(2m+1)! = x^2/3
    long double sum = term;
    for (int m = 2; m < 30; ++m) {
      term *= -q * (2.0L * m) / ((2.0L * m) * (2.0L * m + 1.0L) * (2.0L * m - 2.0L));
      sum += term;
      if (std::fabs(term) < 1e-25L * std::fabs(sum)) break;
    }
    return sum;
  }
  return std::sin(x) / x - std::cos(x);
}

}  // namespace

double bessel_j(int order, double x, bool half) {
  require(x >= 0, "bessel_j: x must be >= 0");
  // The 1e-12 absolute-error contract is certified on [0, 1e4]; the
  // asymptotic branch only sharpens beyond, so larger arguments (needed by
  // kernel tail integrals) are accepted up to the argument-reduction limit.
  require(x <= 1e6, "bessel_j: x out of supported range");
  if (!half) {
    require(order >= 0 && order <= 2, "bessel_j: integer order must be 0, 1 or 2");
    const long double xl = x;
    if (x < 15.0) return static_cast<double>(j_series(order, xl));
    return static_cast<double>(j_asymptotic(order, xl));
  }
  require(order == 0 || order == 1, "bessel_j: half orders limited to 1/2 and 3/2");
  if (x == 0) return 0.0;
  const long double xl = x;
  const long double pref = std::sqrt(2.0L / (kPiL * xl));
  if (order == 0) return static_cast<double>(pref * std::sin(xl));  // J_{1/2}
  return static_cast<double>(pref * sinc_minus_cos(xl));            // J_{3/2}
}

double g_kernel(int d, double x) {
  require(d == 2 || d == 3, "g_kernel: d must be 2 or 3");
  require(x >= 0, "g_kernel: x must be >= 0");
  const long double y = 2.0L * kPiL * static_cast<long double>(x);
  if (d == 2) {
    if (y < 0.5L) {
      // J_1(y)/y = (1/2) sum_k (-1)^k (y^2/4)^k / (k! (k+1)!)
      const long double q = y * y / 4.0L;
      long double term = 0.5L, sum = 0.5L;
      for (int k = 1; k < 30; ++k) {
        term *= -q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (std::fabs(term) < 1e-25L * std::fabs(sum)) break;
      }
      return static_cast<double>(sum);
    }
    return bessel_j(1, static_cast<double>(y)) / static_cast<double>(y);
  }
  // d=3: J_{3/2}(y)/y^{3/2} = sqrt(2/pi) (sin y / y - cos y) / y^2
  const long double t = sinc_minus_cos(y);
  if (y < 0.5L) {
    // expand t/y^2 with the same series to keep the 0/0 limit finite
    const long double q = y * y;
    long double term = 1.0L / 3.0L, sum = term;
    for (int m = 2; m < 30; ++m) {
      term *= -q * (2.0L * m) / ((2.0L * m) * (2.0L * m + 1.0L) * (2.0L * m - 2.0L));
      sum += term;
      if (std::fabs(term) < 1e-25L * std::fabs(sum)) break;
    }
    return static_cast<double>(std::sqrt(2.0L / kPiL) * sum);
  }
  return static_cast<double>(std::sqrt(2.0L / kPiL) * t / (y * y));
}

double h_kernel(int d, double x) {
  require(d == 2 || d == 3, "h_kernel: d must be 2 or 3");
  require(x >= 0, "h_kernel: x must be >= 0");
  const long double y = 2.0L * kPiL * static_cast<long double>(x);
  if (d == 2) {
    if (y < 0.5L) {
      const double g = g_kernel(2, x);
      return g * g;
    }
    const double j1 = bessel_j(1, static_cast<double>(y));
    return (j1 * j1) / static_cast<double>(y * y);
  }
  if (y < 0.5L) {
    const double g = g_kernel(3, x);
    return g * g;
  }
  const long double t = sinc_minus_cos(y);
  const long double y2 = y * y;
  return static_cast<double>((2.0L / kPiL) * (t * t) / (y2 * y2));
}

double g2_derivative(double x) {
  require(x > 0, "g2_derivative: x must be > 0");
  return -bessel_j(2, kTwoPi * x) / x;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  require(b >= a, "integrate: b must be >= a");
  require(spec.abs_tol > 0, "integrate: abs_tol must be > 0");
  if (a == b) return 0.0;
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, spec.max_depth, spec.abs_tol, &err);
  if (!(err <= spec.abs_tol)) {
    throw BudgetError("integrate: tolerance not certified within max_depth");
  }
  return val;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureSpec& spec,
                             const std::function<double(double)>& tail_bound) {
  require(spec.abs_tol > 0, "integrate: abs_tol must be > 0");
  double cutoff = std::max(a + 1.0, 1.0);
  bool certified = false;
  for (int i = 0; i < 64; ++i) {
    const double tb = tail_bound(cutoff);
    require(tb >= 0, "integrate: tail bound must be nonnegative");
    if (tb <= spec.abs_tol / 2) {
      certified = true;
      break;
    }
    cutoff *= 2;
  }
  if (!certified) throw BudgetError("integrate: tail bound never certified the remainder");
  QuadratureSpec finite = spec;
  finite.abs_tol = spec.abs_tol / 2;
  return integrate(f, a, cutoff, finite);
}

}  // namespace toral
