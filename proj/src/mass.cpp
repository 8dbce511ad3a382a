#include "toralmass/mass.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "toralmass/specfun.hpp"

namespace toral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ball_prefactor(int d, double r) {
  // (2 pi)^{d/2} r^d
  return std::pow(kTwoPi, 0.5 * d) * std::pow(r, d);
}

void require_radius(double r) {
  require(r > 0.0 && r < 0.5, "radius must lie in (0, 1/2)");
}

using DiffMap = std::unordered_map<IVec, std::complex<double>, IVecHash>;

// Difference table of the pair expansion: u_delta = sum over ordered pairs
// with lambda - lambda' = delta of c_l conj(c_l') g_d(r |delta|).  The zero
// difference is excluded, matching the off-diagonal pair sum.
DiffMap difference_table(const CoefficientVector& cv, double r) {
  const auto& set = cv.set();
  const auto& pts = set.points();
  const std::size_t n_pts = pts.size();
  const int d = set.dim();
  DiffMap u;
  u.reserve(n_pts * n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    for (std::size_t j = 0; j < n_pts; ++j) {
      if (i == j) continue;
      const IVec delta = sub(pts[i], pts[j]);
      const double dist = std::sqrt(static_cast<double>(norm_sq(delta)));
      u[delta] += cv.coeffs()[i] * std::conj(cv.coeffs()[j]) * g_kernel(d, r * dist);
    }
  }
  return u;
}

// Convolution of two difference tables with work metering.
DiffMap convolve(const DiffMap& a, const DiffMap& b, u64 budget, u64& used) {
  const u64 ops = static_cast<u64>(a.size()) * static_cast<u64>(b.size());
  used += ops;
  if (used > budget) throw BudgetError("difference-table convolution exceeds work budget");
  DiffMap out;
  out.reserve(std::min<u64>(ops, 1u << 20));
  for (const auto& [s, va] : a)
    for (const auto& [t, vb] : b) out[add(s, t)] += va * vb;
  return out;
}

double real_part_checked(std::complex<double> z, const char* what) {
  require(std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z.real())), what);
  return z.real();
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Composite 15-point Gauss-Legendre on [lo, hi] split into `subs` equal
// pieces, applied to g.
template <typename F>
double composite_gauss(const F& g, double lo, double hi, int subs) {
  using rule = boost::math::quadrature::gauss<double, 15>;
  const auto& xs = rule::abscissa();  // nonnegative half, xs[0] == 0
  const auto& ws = rule::weights();
  const double step = (hi - lo) / subs;
  double total = 0.0;
  for (int s = 0; s < subs; ++s) {
    const double mid = lo + (s + 0.5) * step;
    const double half = 0.5 * step;
    double acc = ws[0] * g(mid);
    for (std::size_t k = 1; k < xs.size(); ++k)
      acc += ws[k] * (g(mid + half * xs[k]) + g(mid - half * xs[k]));
    total += acc * half;
  }
  return total;
}

struct GridOrders {
  std::size_t m_phi;
  int subs_r, subs_polar;
};

double ball_rule(const std::function<double(const std::array<double, 3>&)>& f,
                 const std::array<double, 3>& x, double r, int d, const GridOrders& g) {
  const double dphi = kTwoPi / static_cast<double>(g.m_phi);
  if (d == 2) {
    auto radial = [&](double rho) {
      double acc = 0.0;
      for (std::size_t j = 0; j < g.m_phi; ++j) {
        const double phi = dphi * static_cast<double>(j);
        acc += f({x[0] + rho * std::cos(phi), x[1] + rho * std::sin(phi), 0.0});
      }
      return rho * acc * dphi;
    };
    return composite_gauss(radial, 0.0, r, g.subs_r);
  }
  auto radial = [&](double rho) {
    auto polar = [&](double t) {  // t = cos(theta)
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      double acc = 0.0;
      for (std::size_t j = 0; j < g.m_phi; ++j) {
        const double phi = dphi * static_cast<double>(j);
        acc += f({x[0] + rho * st * std::cos(phi), x[1] + rho * st * std::sin(phi),
                  x[2] + rho * t});
      }
      return acc * dphi;
    };
    return rho * rho * composite_gauss(polar, -1.0, 1.0, g.subs_polar);
  };
  return composite_gauss(radial, 0.0, r, g.subs_r);
}

double integrate_ball_impl(const std::function<double(const std::array<double, 3>&)>& f,
                           const std::array<double, 3>& x, double r, int d, double tol,
                           double band_hint) {
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(r > 0.0, "ball radius must be positive");
  require(tol > 0.0, "tolerance must be positive");
  const double band = band_hint > 0.0 ? band_hint : 48.0;
  GridOrders g;
  g.m_phi = next_pow2(static_cast<std::size_t>(band + 16.0));
  if (g.m_phi < 32) g.m_phi = 32;
  g.subs_r = std::max(2, static_cast<int>(std::ceil(band / 40.0)) + 1);
  g.subs_polar = g.subs_r;
  double prev = ball_rule(f, x, r, d, g);
  for (int round = 0; round < 6; ++round) {
    g.m_phi *= 2;
    g.subs_r *= 2;
    g.subs_polar *= 2;
    const double cur = ball_rule(f, x, r, d, g);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw BudgetError("ball quadrature failed to converge within the refinement budget");
}

}  // namespace

// ---------------------------------------------------------------------------
// MassEvaluator

MassEvaluator::MassEvaluator(const CoefficientVector& cv, double r) {
  cv.require_hermitian("mass evaluation");
  require_radius(r);
  const auto& set = cv.set();
  d_ = set.dim();
  r_ = r;
  volume_ = expectation_exact(r, d_);
  prefactor_ = ball_prefactor(d_, r);
  const auto& pts = set.points();
  n_pts_ = pts.size();
  px_.resize(n_pts_);
  py_.resize(n_pts_);
  pz_.resize(n_pts_);
  for (std::size_t i = 0; i < n_pts_; ++i) {
    px_[i] = static_cast<double>(pts[i][0]);
    py_[i] = static_cast<double>(pts[i][1]);
    pz_[i] = static_cast<double>(pts[i][2]);
  }
  gr_.resize(n_pts_ * (n_pts_ - 1) / 2);
  gi_.resize(gr_.size());
  weights_real_ = true;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_pts_; ++i) {
    for (std::size_t j = i + 1; j < n_pts_; ++j, ++k) {
      const IVec delta = sub(pts[i], pts[j]);
      const double dist = std::sqrt(static_cast<double>(norm_sq(delta)));
      const std::complex<double> w =
          cv.coeffs()[i] * std::conj(cv.coeffs()[j]) * g_kernel(d_, r * dist);
      gr_[k] = w.real();
      gi_[k] = w.imag();
      if (gi_[k] != 0.0) weights_real_ = false;
    }
  }
}

double MassEvaluator::operator()(const std::array<double, 3>& x) const {
  thread_local std::vector<double> er, ei;
  er.resize(n_pts_);
  ei.resize(n_pts_);
  for (std::size_t i = 0; i < n_pts_; ++i) {
    const double phase = kTwoPi * (px_[i] * x[0] + py_[i] * x[1] + pz_[i] * x[2]);
    er[i] = std::cos(phase);
    ei[i] = std::sin(phase);
  }
  // X = vol + C * sum_{i != j} G_ij e_i conj(e_j); the sum is real because G
  // is Hermitian, so only the real part of each upper-triangle product is
  // accumulated (twice).
  double s = 0.0;
  std::size_t k = 0;
  if (weights_real_) {
    for (std::size_t i = 0; i < n_pts_; ++i) {
      const double ari = er[i], aii = ei[i];
      double row = 0.0;
      for (std::size_t j = i + 1; j < n_pts_; ++j, ++k)
        row += gr_[k] * (ari * er[j] + aii * ei[j]);
      s += row;
    }
  } else {
    for (std::size_t i = 0; i < n_pts_; ++i) {
      const double ari = er[i], aii = ei[i];
      double row = 0.0;
      for (std::size_t j = i + 1; j < n_pts_; ++j, ++k)
        row += gr_[k] * (ari * er[j] + aii * ei[j]) +
               gi_[k] * (aii * er[j] - ari * ei[j]);
      s += row;
    }
  }
  return volume_ + 2.0 * prefactor_ * s;
}

double MassEvaluator::evaluate_complex_sum(const std::array<double, 3>& x) const {
  std::complex<double> acc = 0.0;
  std::size_t k = 0;
  std::vector<std::complex<double>> e(n_pts_);
  for (std::size_t i = 0; i < n_pts_; ++i) {
    const double phase = kTwoPi * (px_[i] * x[0] + py_[i] * x[1] + pz_[i] * x[2]);
    e[i] = {std::cos(phase), std::sin(phase)};
  }
  for (std::size_t i = 0; i < n_pts_; ++i)
    for (std::size_t j = i + 1; j < n_pts_; ++j, ++k) {
      const std::complex<double> g{gr_[k], gi_[k]};
      const std::complex<double> cross = e[i] * std::conj(e[j]);
      acc += g * cross + std::conj(g * cross);
    }
  require(std::abs(acc.imag()) <= 1e-9, "pair sum must be real");
  return volume_ + prefactor_ * acc.real();
}

double mass_exact(const CoefficientVector& cv, const std::array<double, 3>& x, double r) {
  return MassEvaluator(cv, r)(x);
}

double integrate_over_ball(const std::function<double(const std::array<double, 3>&)>& f,
                           const std::array<double, 3>& x, double r, int d, double tol) {
  return integrate_ball_impl(f, x, r, d, tol, 0.0);
}

double mass_quadrature(const CoefficientVector& cv, const std::array<double, 3>& x,
                       double r, double tol) {
  cv.require_hermitian("mass quadrature");
  require_radius(r);
  // f^2 oscillates with total bandwidth about 2 * 2 pi * 2 sqrt(n) * r.
  const double band =
      8.0 * std::numbers::pi * r * std::sqrt(static_cast<double>(cv.set().n()));
  auto f = [&](const std::array<double, 3>& p) {
    const double v = evaluate(cv, p);
    return v * v;
  };
  return integrate_ball_impl(f, x, r, cv.set().dim(), tol, band);
}

// ---------------------------------------------------------------------------
// Exact moments

double expectation_exact(double r, int d) {
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(r > 0.0, "ball radius must be positive");
  if (d == 2) return std::numbers::pi * r * r;
  return 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

double variance_spectral(const CoefficientVector& cv, double r) {
  require_radius(r);
  const auto& set = cv.set();
  const auto& pts = set.points();
  const std::size_t n_pts = pts.size();
  const int d = set.dim();
  const double two_t = 2.0 * r * std::sqrt(static_cast<double>(set.n()));
  std::vector<double> w(n_pts);
  std::vector<std::complex<double>> a(n_pts);
  std::vector<std::size_t> anti(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    w[i] = cv.weight(i);
    anti[i] = set.index_of(neg(pts[i]));
    a[i] = cv.coeffs()[i] * cv.coeffs()[anti[i]];
  }
  double paired = 0.0;
  for (std::size_t i = 0; i < n_pts; ++i)
    for (std::size_t j = i + 1; j < n_pts; ++j) {
      const double dist = std::sqrt(static_cast<double>(norm_sq(sub(pts[i], pts[j]))));
      paired += (w[i] * w[j] + (a[i] * std::conj(a[j])).real()) *
                h_kernel(d, r * dist);
    }
  paired *= 2.0;  // ordered pairs
  double diametral = 0.0;
  for (std::size_t i = 0; i < n_pts; ++i) diametral += w[i] * w[anti[i]];
  diametral *= h_kernel(d, two_t);
  const double pref = ball_prefactor(d, r);
  return pref * pref * (paired - diametral);
}

double variance_exact_tuple(const CoefficientVector& cv, double r) {
  require_radius(r);
  const DiffMap u = difference_table(cv, r);
  double acc = 0.0;
  for (const auto& [delta, v] : u) acc += std::norm(v);
  const double pref = ball_prefactor(cv.set().dim(), r);
  return pref * pref * acc;
}

double moment_exact_tuple(const CoefficientVector& cv, double r, int k, u64 budget) {
  require_radius(r);
  require(k >= 2 && k <= 8, "moment order must lie in [2, 8]");
  u64 used = 0;
  const DiffMap u = difference_table(cv, r);
  const int half_lo = k / 2, half_hi = k - k / 2;
  DiffMap left = u, right = u;
  for (int t = 1; t < half_lo; ++t) left = convolve(left, u, budget, used);
  for (int t = 1; t < half_hi; ++t) right = convolve(right, u, budget, used);
  used += std::min(left.size(), right.size());
  if (used > budget) throw BudgetError("difference-table join exceeds work budget");
  std::complex<double> acc = 0.0;
  const DiffMap& probe = left.size() <= right.size() ? left : right;
  const DiffMap& table = left.size() <= right.size() ? right : left;
  for (const auto& [s, v] : probe) {
    const auto it = table.find(neg(s));
    if (it != table.end()) acc += v * it->second;
  }
  const double scale = std::pow(ball_prefactor(cv.set().dim(), r), k);
  return scale * real_part_checked(acc, "tuple moment must be real");
}

double restricted_moment_exact(const CoefficientVector& cv, double r,
                               const std::array<double, 3>& x0, double rho, int k,
                               u64 budget) {
  require_radius(r);
  require(cv.set().dim() == 2, "restricted moments are defined for d = 2");
  require(rho > 0.0 && rho < 0.5, "restriction radius must lie in (0, 1/2)");
  require(k == 1 || k == 2, "restricted moment order must be 1 or 2");
  // Averaging e(<x, s>) over x uniform in B_{x0}(rho) gives
  // 2 e(<x0, s>) g_2(rho |s|) for s != 0 and 1 for s = 0.
  auto ball_avg = [&](const IVec& s) -> std::complex<double> {
    if (s == IVec{0, 0, 0}) return 1.0;
    const double dot = static_cast<double>(s[0]) * x0[0] +
                       static_cast<double>(s[1]) * x0[1] +
                       static_cast<double>(s[2]) * x0[2];
    const double dist = std::sqrt(static_cast<double>(norm_sq(s)));
    const double amp = 2.0 * g_kernel(2, rho * dist);
    return std::complex<double>(std::cos(kTwoPi * dot), std::sin(kTwoPi * dot)) * amp;
  };
  u64 used = 0;
  const DiffMap u = difference_table(cv, r);
  const double pref = ball_prefactor(2, r);
  std::complex<double> m1 = 0.0;
  for (const auto& [delta, v] : u) m1 += v * ball_avg(delta);
  m1 *= pref;
  const double mean_offset = real_part_checked(m1, "restricted mean must be real");
  if (k == 1) return mean_offset;
  const DiffMap pair_sums = convolve(u, u, budget, used);
  std::complex<double> m2 = 0.0;
  for (const auto& [s, v] : pair_sums) m2 += v * ball_avg(s);
  m2 *= pref * pref;
  return real_part_checked(m2, "restricted second moment must be real") -
         mean_offset * mean_offset;
}

double predict_variance_asymptotic(int d, double theta, double r, double t_planck) {
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(t_planck > 0.0, "Planck parameter must be positive");
  if (d == 2) {
    const double c = std::cos(theta);
    // cos(pi/2) rounds to 6e-17 rather than 0, so a plain positivity check
    // would let the degenerate angle through
    require(c > 1e-9, "theta must keep cos(theta) positive");
    return 16.0 / (3.0 * std::numbers::pi * c * c) * std::pow(r, 4) / t_planck;
  }
  return std::pow(r, 6) / (t_planck * t_planck);
}

// ---------------------------------------------------------------------------
// Pair-distance statistics

double pair_distance_point(const LatticePointSet& set, const IVec& lambda0, double s) {
  require(set.dim() == 2, "the pointwise pair-distance law is defined for d = 2");
  require(set.contains(lambda0), "reference frequency must belong to the set");
  require(s >= 0.0 && s <= 2.0, "distance threshold must lie in [0, 2]");
  const double scale = 1.0 / std::sqrt(static_cast<double>(set.n()));
  i64 count = 0;
  for (const auto& p : set.points()) {
    const double dist =
        scale * std::sqrt(static_cast<double>(norm_sq(sub(p, lambda0))));
    if (dist <= s) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(set.size());
}

double pair_distance_weighted(const CoefficientVector& cv, double s) {
  require(cv.set().dim() == 2, "the weighted pair-distance law is defined for d = 2");
  require(s >= 0.0 && s <= 2.0, "distance threshold must lie in [0, 2]");
  const auto& set = cv.set();
  const auto& pts = set.points();
  const double scale = 1.0 / std::sqrt(static_cast<double>(set.n()));
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dist =
          scale * std::sqrt(static_cast<double>(norm_sq(sub(pts[i], pts[j]))));
      if (dist <= s) acc += cv.weight(i) * cv.weight(j);
    }
  return 2.0 * acc;
}

double pair_distance_uniform3(const LatticePointSet& set, double s) {
  require(set.dim() == 3, "the uniform pair-distance law is defined for d = 3");
  require(s >= 0.0 && s <= 2.0, "distance threshold must lie in [0, 2]");
  const auto& pts = set.points();
  const double scale = 1.0 / std::sqrt(static_cast<double>(set.n()));
  i64 count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dist =
          scale * std::sqrt(static_cast<double>(norm_sq(sub(pts[i], pts[j]))));
      if (dist <= s) ++count;
    }
  const double n_pts = static_cast<double>(set.size());
  return 2.0 * static_cast<double>(count) / (n_pts * n_pts);
}

i64 close_pair_count(const std::vector<std::array<double, 3>>& unit_points, int d,
                     double t_planck) {
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(t_planck > 1.0, "Planck parameter must exceed 1");
  const double thresh = 1.0 / t_planck;
  const double thresh_sq = thresh * thresh;
  i64 count = 0;
  for (std::size_t i = 0; i < unit_points.size(); ++i)
    for (std::size_t j = i + 1; j < unit_points.size(); ++j) {
      const double ddx = unit_points[i][0] - unit_points[j][0];
      const double ddy = unit_points[i][1] - unit_points[j][1];
      const double ddz = unit_points[i][2] - unit_points[j][2];
      if (ddx * ddx + ddy * ddy + ddz * ddz <= thresh_sq) ++count;
    }
  return 2 * count;
}

}  // namespace toral
