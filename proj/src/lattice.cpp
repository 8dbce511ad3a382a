#include "toralmass/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

#include "toralmass/rng.hpp"

namespace toral {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

i64 isqrt_floor(i64 v) {
  if (v < 0) return -1;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

bool is_square(i64 v, i64* root) {
  if (v < 0) return false;
  i64 r = isqrt_floor(v);
  if (r * r != v) return false;
  *root = r;
  return true;
}

// Quadrant index for the counterclockwise-from-angle-0 ordering.
int quadrant(const IVec& p) {
  if (p[0] > 0 && p[1] >= 0) return 0;
  if (p[0] <= 0 && p[1] > 0) return 1;
  if (p[0] < 0 && p[1] <= 0) return 2;
  return 3;
}

// Strict angular order on nonzero planar integer vectors, exact.
bool angle_less(const IVec& a, const IVec& b) {
  int qa = quadrant(a), qb = quadrant(b);
  if (qa != qb) return qa < qb;
  i64 cross = a[0] * b[1] - a[1] * b[0];
  return cross > 0;
}

}  // namespace

LatticePointSet LatticePointSet::enumerate(i64 n, int d) {
  require(n >= 1, "lattice: n must be >= 1");
  require(d == 2 || d == 3, "lattice: d must be 2 or 3");
  LatticePointSet out;
  out.n_ = n;
  out.d_ = d;
  const i64 s = isqrt_floor(n);
  if (d == 2) {
    for (i64 a = -s; a <= s; ++a) {
      i64 b;
      if (!is_square(n - a * a, &b)) continue;
      out.pts_.push_back({a, b, 0});
      if (b != 0) out.pts_.push_back({a, -b, 0});
    }
    std::sort(out.pts_.begin(), out.pts_.end(), angle_less);
    out.angles_.reserve(out.pts_.size());
    for (const IVec& p : out.pts_) {
      double phi = std::atan2(static_cast<double>(p[1]), static_cast<double>(p[0]));
      if (phi < 0) phi += kTwoPi;
      out.angles_.push_back(phi);
    }
  } else {
    for (i64 a = -s; a <= s; ++a) {
      const i64 rem_a = n - a * a;
      const i64 sb = isqrt_floor(rem_a);
      for (i64 b = -sb; b <= sb; ++b) {
        i64 c;
        if (!is_square(rem_a - b * b, &c)) continue;
        out.pts_.push_back({a, b, c});
        if (c != 0) out.pts_.push_back({a, b, -c});
      }
    }
    std::sort(out.pts_.begin(), out.pts_.end());
  }
  out.index_.reserve(out.pts_.size() * 2);
  for (std::size_t i = 0; i < out.pts_.size(); ++i) out.index_.emplace(out.pts_[i], i);
  return out;
}

const std::vector<double>& LatticePointSet::angles() const {
  require(d_ == 2, "angles: defined for d=2 only");
  return angles_;
}

std::size_t LatticePointSet::index_of(const IVec& v) const {
  auto it = index_.find(v);
  require(it != index_.end(), "index_of: point not in set");
  return it->second;
}

IVec LatticePointSet::clockwise_successor(const IVec& v) const {
  require(d_ == 2, "clockwise_successor: defined for d=2 only");
  require(!pts_.empty(), "clockwise_successor: empty set");
  const std::size_t i = index_of(v);
  return pts_[(i + pts_.size() - 1) % pts_.size()];
}

bool is_sum_of_squares(i64 n, int d) {
  require(n >= 1, "is_sum_of_squares: n must be >= 1");
  require(d == 2 || d == 3, "is_sum_of_squares: d must be 2 or 3");
  if (d == 3) {
    i64 m = n;
    while (m % 4 == 0) m /= 4;
    if (m % 8 == 7) return false;  // Legendre obstruction, including n = 7 mod 8
    return true;
  }
  // d=2: n representable iff every prime 3 mod 4 divides n to an even power.
  i64 m = n;
  for (i64 p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (p % 4 == 3 && e % 2 == 1) return false;
  }
  if (m > 1 && m % 4 == 3) return false;
  return true;
}

DiscrepancyResult angular_discrepancy(const LatticePointSet& set) {
  require(set.dim() == 2, "angular_discrepancy: d=2 only");
  const std::vector<double>& phi = set.angles();
  const i64 N = static_cast<i64>(phi.size());
  require(N >= 1, "angular_discrepancy: empty set");
  DiscrepancyResult res;
  res.exact = true;
  const double invN = 1.0 / static_cast<double>(N);

  auto consider = [&](double count, double len, i64 i, i64 j, bool cl, bool ch) {
    const double v = std::abs(count * invN - len / kTwoPi);
    if (v > res.value) {
      res.value = v;
      res.witness.a = phi[static_cast<std::size_t>(i)];
      res.witness.b = phi[static_cast<std::size_t>(j)];
      res.witness.closed_low = cl;
      res.witness.closed_high = ch;
      res.witness.count = static_cast<i64>(count);
    }
  };

  // Degenerate single-point arc: count 1, length 0.
  consider(1, 0.0, 0, 0, true, true);
  for (i64 i = 0; i < N; ++i) {
    for (i64 j = 0; j < N; ++j) {
      if (i == j) continue;
      double len = phi[static_cast<std::size_t>(j)] - phi[static_cast<std::size_t>(i)];
      if (len < 0) len += kTwoPi;
      const i64 inside = (j - i - 1 + N) % N;  // strictly between, ccw
      consider(static_cast<double>(inside + 2), len, i, j, true, true);
      consider(static_cast<double>(inside + 1), len, i, j, true, false);
      consider(static_cast<double>(inside + 1), len, i, j, false, true);
      consider(static_cast<double>(inside), len, i, j, false, false);
    }
  }
  return res;
}

HypothesisD check_hypothesis_D(const LatticePointSet& set, double eps) {
  require(set.n() >= 3, "hypothesis_D: requires n >= 3 (log n > 1)");
  require(eps > 0, "hypothesis_D: eps must be positive");
  HypothesisD h;
  h.delta = angular_discrepancy(set).value;
  const double exponent = -0.5 * std::log(1.5707963267948966) + eps;
  h.threshold = std::pow(std::log(static_cast<double>(set.n())), exponent);
  h.margin = h.threshold - h.delta;
  h.holds = h.margin >= 0;
  return h;
}

namespace {

// Sweeps all cap radii for one axis direction and keeps the best
// |count/N - r^2/4| candidate.  dots[i] must hold w-hat . p-hat for every
// projected point; groups of equal dot products are treated as one distance
// ring so every candidate corresponds to a realisable (or limiting) cap.
void cap_radius_sweep(const std::vector<double>& dots,
                      const std::array<double, 3>& centre, double* best,
                      DiscrepancyWitness* wit) {
  std::vector<double> t(dots);
  std::sort(t.begin(), t.end(), std::greater<double>());
  const i64 N = static_cast<i64>(t.size());
  const double invN = 1.0 / static_cast<double>(N);
  auto consider = [&](i64 count, double rsq, bool boundary_in) {
    const double v = std::abs(static_cast<double>(count) * invN - rsq / 4.0);
    if (v > *best) {
      *best = v;
      wit->centre = centre;
      wit->rad = std::sqrt(std::max(0.0, rsq));
      wit->boundary_included = boundary_in;
      wit->count = count;
    }
  };
  i64 k = 0;
  while (k < N) {
    i64 g = k;
    while (g + 1 < N && t[static_cast<std::size_t>(g + 1)] == t[static_cast<std::size_t>(k)]) ++g;
    const double rsq = 2.0 - 2.0 * t[static_cast<std::size_t>(k)];
    consider(k, rsq, false);      // radius approaching this ring from below
    consider(g + 1, rsq, true);   // closed cap through the ring
    k = g + 1;
  }
  consider(N, 4.0, true);  // whole sphere
}

}  // namespace

DiscrepancyResult spherical_cap_discrepancy(const LatticePointSet& set,
                                            CapMode mode, i64 samples,
                                            u64 seed,
                                            std::size_t exact_bound) {
  require(set.dim() == 3, "spherical_cap_discrepancy: d=3 only");
  const std::vector<IVec>& pts = set.points();
  const std::size_t N = pts.size();
  require(N >= 1, "spherical_cap_discrepancy: empty set");

  const double sqrt_n = std::sqrt(static_cast<double>(set.n()));
  std::vector<std::array<double, 3>> unit(N);
  for (std::size_t i = 0; i < N; ++i)
    unit[i] = {static_cast<double>(pts[i][0]) / sqrt_n,
               static_cast<double>(pts[i][1]) / sqrt_n,
               static_cast<double>(pts[i][2]) / sqrt_n};

  DiscrepancyResult res;
  std::vector<double> dots(N);

  auto sweep_float_axis = [&](const std::array<double, 3>& w) {
    for (std::size_t i = 0; i < N; ++i)
      dots[i] = w[0] * unit[i][0] + w[1] * unit[i][1] + w[2] * unit[i][2];
    cap_radius_sweep(dots, w, &res.value, &res.witness);
  };

  if (mode == CapMode::kSampled) {
    res.exact = false;
    require(samples >= 1, "spherical_cap_discrepancy: samples must be >= 1");
    for (i64 s = 0; s < samples; ++s) {
      // Uniform direction via the standard Gaussian-free recipe: z uniform
      // in [-1,1], azimuth uniform.
      const double z = 2.0 * uniform01(rng_at(seed, rng_stream::kCapCentre, 2 * static_cast<u64>(s))) - 1.0;
      const double az = kTwoPi * uniform01(rng_at(seed, rng_stream::kCapCentre, 2 * static_cast<u64>(s) + 1));
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      sweep_float_axis({rho * std::cos(az), rho * std::sin(az), z});
    }
    return res;
  }

  require(N <= exact_bound, "spherical_cap_discrepancy: exact mode refused above exact_bound points");
  res.exact = true;

  // Candidate axes as integer directions.  A locally extremal cap either has
  // its boundary through <= 1 point (axis at a data direction), through 2
  // points with the axis on their bisector circle (extremised at the sum
  // direction), or through 3 points (circumcentre axis, a cross product of
  // chords).  All are rational directions, so the dot-product ordering and
  // the equal-distance grouping below are exact integer comparisons.
  std::unordered_set<IVec, IVecHash> axes;
  auto push_axis = [&](IVec v) {
    if (v[0] == 0 && v[1] == 0 && v[2] == 0) return;
    i64 g = std::gcd(std::gcd(std::llabs(v[0]), std::llabs(v[1])), std::llabs(v[2]));
    for (auto& c : v) c /= g;
    axes.insert(v);
    axes.insert(neg(v));
  };
  for (std::size_t i = 0; i < N; ++i) {
    push_axis(pts[i]);
    for (std::size_t j = i + 1; j < N; ++j) push_axis(add(pts[i], pts[j]));
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const IVec u = sub(pts[j], pts[i]);
      for (std::size_t k = j + 1; k < N; ++k) {
        const IVec v = sub(pts[k], pts[i]);
        push_axis({u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                   u[0] * v[1] - u[1] * v[0]});
      }
    }

  std::vector<i64> idots(N);
  for (const IVec& ax : axes) {
    for (std::size_t i = 0; i < N; ++i) idots[i] = dot(ax, pts[i]);
    const double axis_norm = std::sqrt(static_cast<double>(norm_sq(ax)));
    const double scale = 1.0 / (axis_norm * sqrt_n);
    for (std::size_t i = 0; i < N; ++i) dots[i] = static_cast<double>(idots[i]) * scale;
    const std::array<double, 3> w = {static_cast<double>(ax[0]) / axis_norm,
                                     static_cast<double>(ax[1]) / axis_norm,
                                     static_cast<double>(ax[2]) / axis_norm};
    // Equal integer dots stay equal after the common positive scaling, so
    // the sweep's distance rings are grouped exactly.
    cap_radius_sweep(dots, w, &res.value, &res.witness);
  }
  return res;
}

}  // namespace toral
