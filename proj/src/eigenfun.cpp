#include "toralmass/eigenfun.hpp"

#include <algorithm>
#include <cmath>

#include "toralmass/rng.hpp"

namespace toral {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Antipodal orbit representative: the member that comes first in canonical
// order.  Orbit index = its canonical position, so sign draws are stable
// under any later re-labelling of the pair.
std::size_t orbit_index(const LatticePointSet& set, std::size_t i) {
  const std::size_t j = set.index_of(neg(set.points()[i]));
  return std::min(i, j);
}

}  // namespace

CoefficientVector::CoefficientVector(LatticePointSet set, std::vector<cplx> coeffs)
    : set_(std::move(set)), c_(std::move(coeffs)) {
  require(c_.size() == set_.size(), "coefficients: one entry per lattice point");
  require(!c_.empty(), "coefficients: empty support");
  double total = 0;
  for (const cplx& z : c_) total += std::norm(z);
  require(std::abs(total - 1.0) <= 1e-12, "coefficients: L2 normalisation");
  hermitian_ = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const std::size_t j = set_.index_of(neg(set_.points()[i]));
    if (c_[j] != std::conj(c_[i])) {
      hermitian_ = false;
      break;
    }
  }
}

void CoefficientVector::require_hermitian(const char* who) const {
  require(hermitian_, std::string(who) + ": conjugate symmetry c_{-lambda} = conj(c_lambda) required");
}

CoefficientVector make_bourgain(const LatticePointSet& set, u64 seed, bool all_plus) {
  const std::size_t N = set.size();
  require(N >= 1, "bourgain: empty set");
  const double amp = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<cplx> c(N);
  for (std::size_t i = 0; i < N; ++i) {
    double sign = 1.0;
    if (!all_plus) {
      const u64 bits = rng_at(seed, rng_stream::kSigns, orbit_index(set, i));
      sign = (bits >> 63) ? -1.0 : 1.0;
    }
    c[i] = cplx(sign * amp, 0.0);
  }
  return CoefficientVector(set, std::move(c));
}

CoefficientVector make_arc_supported(const LatticePointSet& set, i64 num, i64 den) {
  require(set.dim() == 2, "arc: d=2 only");
  const i64 N = static_cast<i64>(set.size());
  require(num >= 1 && den >= 1 && num <= den, "arc: t must be in (0, 1]");
  require((N * num) % den == 0, "arc: N*t must be an integer");
  const i64 nt = N * num / den;
  require(nt % 2 == 0, "arc: N*t must be even so the block can be symmetrised");
  const i64 half = nt / 2;
  std::vector<cplx> c(static_cast<std::size_t>(N), cplx(0, 0));
  const double amp = 1.0 / std::sqrt(static_cast<double>(nt));
  i64 placed = 0;
  for (i64 k = 0; k < half; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const std::size_t j = set.index_of(neg(set.points()[i]));
    require(c[i] == cplx(0, 0) && c[j] == cplx(0, 0),
            "arc: block of N*t/2 consecutive points meets its own negation");
    c[i] = cplx(amp, 0);
    c[j] = cplx(amp, 0);
    placed += 2;
  }
  require(placed == nt, "arc: support size mismatch");
  return CoefficientVector(set, std::move(c));
}

CoefficientVector make_bv_density(const LatticePointSet& set,
                                  const std::vector<double>& breakpoints,
                                  const std::vector<double>& values) {
  require(set.dim() == 2, "bv_density: d=2 only");
  require(!breakpoints.empty() && breakpoints.size() == values.size(),
          "bv_density: one value per breakpoint");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    require(breakpoints[i] >= 0 && breakpoints[i] < kTwoPi, "bv_density: breakpoints in [0, 2*pi)");
    if (i) require(breakpoints[i] > breakpoints[i - 1], "bv_density: breakpoints strictly increasing");
    require(values[i] >= 0, "bv_density: density must be nonnegative");
  }
  auto density_at = [&](double phi) {
    // value on [b_i, b_{i+1}), wrapping so [b_last, 2*pi) u [0, b_0) takes
    // the last value
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), phi);
    const std::size_t k =
        (it == breakpoints.begin()) ? values.size() - 1
                                    : static_cast<std::size_t>(it - breakpoints.begin() - 1);
    return values[k];
  };
  const std::vector<double>& phi = set.angles();
  std::vector<double> w(phi.size());
  double total = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    w[i] = density_at(phi[i]);
    total += w[i];
  }
  require(total > 0, "bv_density: density vanishes at every lattice angle");
  std::vector<cplx> c(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) c[i] = cplx(std::sqrt(w[i] / total), 0);
  return CoefficientVector(set, std::move(c));
}

CoefficientVector make_explicit(const LatticePointSet& set,
                                const std::vector<ExplicitEntry>& entries) {
  require(!entries.empty(), "explicit: no entries");
  std::vector<cplx> c(set.size(), cplx(0, 0));
  for (const ExplicitEntry& e : entries) {
    require(set.contains(e.lambda), "explicit: lambda outside the lattice set");
    const std::size_t i = set.index_of(e.lambda);
    require(c[i] == cplx(0, 0), "explicit: duplicate lambda");
    c[i] = e.c;
  }
  return CoefficientVector(set, std::move(c));
}

FlatnessReport flatness_report(const CoefficientVector& cv, double epsilon,
                               double t_planck, double eta) {
  const std::size_t N = cv.size();
  const double dN = static_cast<double>(N);
  FlatnessReport rep;
  rep.epsilon = epsilon;
  rep.t_planck = t_planck;
  rep.eta = eta;
  double max_w = 0, sum_w2 = 0;
  bool flat_moduli = true, real_signs = true;
  const double amp = 1.0 / std::sqrt(dN);
  for (std::size_t i = 0; i < N; ++i) {
    const double w = cv.weight(i);
    max_w = std::max(max_w, w);
    sum_w2 += w * w;
    if (std::abs(std::abs(cv.coeffs()[i]) - amp) > 1e-12 * amp) flat_moduli = false;
    if (std::abs(cv.coeffs()[i].imag()) > 1e-15) real_signs = false;
  }
  rep.v_inf = dN * max_w;
  rep.a4 = dN * sum_w2;
  rep.theta = std::acos(1.0 / std::sqrt(rep.a4));
  rep.is_bourgain = flat_moduli && real_signs;
  if (cv.set().dim() == 2) {
    // Total variation of the squared moduli along the circle, clockwise
    // nearest neighbour steps; orientation does not matter for the sum.
    double v = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t prev = (i + N - 1) % N;  // clockwise successor of pts[i]
      v += std::abs(cv.weight(i) - cv.weight(prev));
    }
    v *= dN;
    rep.v = v;
    rep.v_tilde = rep.v_inf * v / rep.a4;
  }
  rep.ultraflat = rep.v_inf <= std::pow(dN, epsilon);
  if (t_planck > 1) {
    if (rep.v_tilde) rep.class_f1 = *rep.v_tilde < eta * t_planck / std::log(t_planck);
    rep.class_f2 = rep.v_inf < std::pow(t_planck, eta);
  }
  return rep;
}

double evaluate(const CoefficientVector& cv, const std::array<double, 3>& x) {
  cv.require_hermitian("evaluate");
  const std::vector<IVec>& pts = cv.set().points();
  cplx sum(0, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double phase = kTwoPi * (x[0] * static_cast<double>(pts[i][0]) +
                                   x[1] * static_cast<double>(pts[i][1]) +
                                   x[2] * static_cast<double>(pts[i][2]));
    sum += cv.coeffs()[i] * cplx(std::cos(phase), std::sin(phase));
  }
  require(std::abs(sum.imag()) <= 1e-10 * static_cast<double>(pts.size()),
          "evaluate: imaginary part exceeded 1e-10 * N");
  return sum.real();
}

}  // namespace toral
