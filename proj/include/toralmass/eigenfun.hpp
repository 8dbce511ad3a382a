#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "toralmass/lattice.hpp"

namespace toral {

using cplx = std::complex<double>;

// L^2-normalised Fourier coefficients on a lattice point set.  Entries are
// aligned with the set's canonical order.  All bundled constructions produce
// real nonnegative coefficients (optionally signed for the random flat
// family), so results are reproducible from the seed alone.
//
// Conjugate symmetry c_{-lambda} = conj(c_lambda) (which makes the
// eigenfunction real-valued) holds for every construction except a
// piecewise-density vector whose density is not antipodally symmetric; such
// vectors are fine for the squared-moduli statistics but are rejected by
// the evaluation and mass paths, which need a real function.
class CoefficientVector {
 public:
  CoefficientVector(LatticePointSet set, std::vector<cplx> coeffs);

  const LatticePointSet& set() const { return set_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }
  bool hermitian() const { return hermitian_; }

  // Squared modulus |c_lambda|^2 by set index.
  double weight(std::size_t i) const { return std::norm(c_[i]); }

  void require_hermitian(const char* who) const;

 private:
  LatticePointSet set_;
  std::vector<cplx> c_;
  bool hermitian_ = false;
};

// Random-sign flat vector: c_lambda = eps_orbit / sqrt(N) with eps = +-1
// drawn per antipodal orbit from the counter RNG, or all +1 when all_plus.
CoefficientVector make_bourgain(const LatticePointSet& set, u64 seed, bool all_plus = false);

// Equal mass 1/(N t) on a block of N t points: the ceil(N t / 2) points that
// are consecutive in the canonical (angular) order starting at angle 0,
// together with their negations.  N t must be a positive even integer.
// d=2 only.
CoefficientVector make_arc_supported(const LatticePointSet& set, i64 num, i64 den);

// Squared moduli proportional to a piecewise-constant density g sampled at
// the lattice angles, normalised to total mass 1; phases real positive.
// breakpoints must be strictly increasing in [0, 2*pi) with values[i] the
// density on [breakpoints[i], breakpoints[i+1]) (wrapping at the end).
// d=2 only.
CoefficientVector make_bv_density(const LatticePointSet& set,
                                  const std::vector<double>& breakpoints,
                                  const std::vector<double>& values);

struct ExplicitEntry {
  IVec lambda;
  cplx c;
};

// Arbitrary explicit coefficients; entries not listed are zero.  Validates
// support, normalisation (within 1e-12) and flags conjugate symmetry.
CoefficientVector make_explicit(const LatticePointSet& set,
                                const std::vector<ExplicitEntry>& entries);

struct FlatnessReport {
  double v_inf = 0;   // N * max |c|^2
  double a4 = 0;      // N * sum |c|^4
  double theta = 0;   // arccos(a4^{-1/2})
  std::optional<double> v;        // d=2: N * sum |w(succ) - w| over the circle
  std::optional<double> v_tilde;  // v_inf * v / a4
  bool is_bourgain = false;
  // Class memberships evaluated at the supplied parameters.
  bool ultraflat = false;     // v_inf <= N^epsilon
  bool class_f1 = false;      // v_tilde < eta * T / log T   (d=2)
  bool class_f2 = false;      // v_inf < T^eta
  double epsilon = 0, t_planck = 0, eta = 0;
};

// Flatness functionals of the squared moduli, plus membership flags for the
// ultraflat / F1 / F2 families at the given (epsilon, T, eta).  The total
// variation V and v_tilde are only defined for d=2.
FlatnessReport flatness_report(const CoefficientVector& cv, double epsilon,
                               double t_planck, double eta);

// f(x) = sum c_lambda e(<x, lambda>).  Requires conjugate symmetry; the
// imaginary part must vanish to 1e-10 * N and the real part is returned.
double evaluate(const CoefficientVector& cv, const std::array<double, 3>& x);

}  // namespace toral
