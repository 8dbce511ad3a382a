#pragma once

#include <functional>
#include <map>
#include <optional>

#include "toralmass/eigenfun.hpp"

namespace toral {

// Local L^2 mass of the eigenfunction over the ball B_x(r), computed from
// the closed-form pair expansion
//   X(x) = vol(B_r) + (2 pi)^{d/2} r^d sum_{lambda != lambda'}
//          c_lambda conj(c_lambda') e(<x, lambda - lambda'>) g_d(r |lambda - lambda'|).
// The evaluator precomputes the pair weights once; each evaluation then
// costs N trig calls plus an O(N^2) quadratic form, with no per-pair trig.
class MassEvaluator {
 public:
  MassEvaluator(const CoefficientVector& cv, double r);

  double operator()(const std::array<double, 3>& x) const;

  // Reference evaluation that accumulates the full complex pair sum and
  // checks the imaginary part vanishes to 1e-9; algebraically identical to
  // operator() and used to cross-check it.
  double evaluate_complex_sum(const std::array<double, 3>& x) const;

  double volume() const { return volume_; }
  double radius() const { return r_; }
  int dim() const { return d_; }

 private:
  int d_;
  double r_, volume_, prefactor_;
  std::size_t n_pts_;
  std::vector<double> px_, py_, pz_;          // lattice points as doubles
  std::vector<double> gr_, gi_;               // packed upper-triangle pair weights
  bool weights_real_ = false;
  mutable std::vector<double> er_, ei_;       // per-point phase scratch
};

double mass_exact(const CoefficientVector& cv, const std::array<double, 3>& x, double r);

// Independent check: integrates evaluate(cv, .)^2 over the ball with a
// polar/spherical tensor rule, refined until two successive refinements
// agree within tol.  Also usable with an arbitrary integrand for sanity
// tests (integrate_over_ball).
double mass_quadrature(const CoefficientVector& cv, const std::array<double, 3>& x,
                       double r, double tol);
double integrate_over_ball(const std::function<double(const std::array<double, 3>&)>& f,
                           const std::array<double, 3>& x, double r, int d, double tol);

// E[X] = pi^{d/2} / Gamma(d/2 + 1) * r^d: pi r^2 (d=2), (4/3) pi r^3 (d=3).
double expectation_exact(double r, int d);

// Variance through the paired-pattern (diagonal) part of the tuple
// expansion.  With w_l = |c_l|^2 and a_l = c_l c_{-l} this is
//   (2 pi)^d r^{2d} [ sum_{lambda != lambda'} (w_l w_l' + Re(a_l conj(a_l')))
//                         h_d(r |l - l'|)
//                     - sum_lambda w_l w_{-l} h_d(2 r sqrt(n)) ],
// the two sums over ordered pairs.  The subtracted term removes the double
// count of the antipodal chords, which the two paired patterns share.  For
// symmetric coefficients a_l = w_l and the bracket is the familiar
// 2 sum w w' h - diag.  For d=2 the four-tuple zero-sum set has no other
// solutions, so this equals the exact variance; for d=3 it is the diagonal
// approximation.
double variance_spectral(const CoefficientVector& cv, double r);

// Exact variance via the zero-sum tuple expansion, grouped by difference
// vectors: (2 pi)^d r^{2d} sum_delta |u_delta|^2 with
// u_delta = sum_{lambda - lambda' = delta} c_l conj(c_l') g_d(r |delta|).
double variance_exact_tuple(const CoefficientVector& cv, double r);

// Exact centred k-th moment via the k-pair zero-sum expansion, meet in the
// middle over difference-vector convolutions.  Work and map sizes are
// metered against the budget.
double moment_exact_tuple(const CoefficientVector& cv, double r, int k,
                          u64 budget = 1'000'000'000);

// Restricted (ball-averaged) exact moments, d=2:
//   k=1: E_{x0,rho}[X] - pi r^2
//   k=2: Var_{x0,rho}[X]  (second moment about pi r^2, re-centred to the
//        restricted mean internally)
// The ball average of e(<x, s>) contributes the factor
// 2 e(<x0, s>) g_2(rho |s|) on each nonzero total frequency s.
double restricted_moment_exact(const CoefficientVector& cv, double r,
                               const std::array<double, 3>& x0, double rho,
                               int k, u64 budget = 1'000'000'000);

// Leading-order variance prediction at Planck scale T = r sqrt(n):
//   d=2: 16/(3 pi cos^2 theta) * r^4 / T;  d=3: r^6 / T^2.
double predict_variance_asymptotic(int d, double theta, double r, double t_planck);

struct McSpec {
  i64 samples = 0;
  u64 seed = 1;
  i64 batch = 4096;
};

struct Restriction {
  std::array<double, 3> x0{0, 0, 0};
  double rho = 0;
};

struct McMomentStats {
  i64 samples = 0;
  double mean = 0, mean_stderr = 0;
  double variance = 0, variance_stderr = 0;      // about the MC mean
  std::map<int, std::array<double, 2>> standardized;  // k -> {estimate, stderr}
  double ks = 0;
  i64 ks_count = 0;
};

// One retained Monte Carlo draw: the centre and the mass there.
struct McSample {
  std::array<double, 3> x{0, 0, 0};
  double mass = 0;
};

// Monte Carlo moments of X over uniform centres (or uniform in B_{x0}(rho)
// when restricted).  Samples are standardized by the supplied exact centre
// and variance; standard errors come from a 20-block jackknife.  Output is
// a pure function of (config, seed): positions come from the counter RNG
// keyed by sample index and accumulation runs over fixed-size chunks merged
// in index order, so any thread count reproduces identical bytes.  When
// samples_out is given it receives every draw in sample order.
McMomentStats monte_carlo_moments(const CoefficientVector& cv, double r,
                                  const McSpec& mc,
                                  const std::optional<Restriction>& restriction,
                                  int moments_upto, double centre_mean,
                                  double centre_variance,
                                  std::vector<McSample>* samples_out = nullptr);

struct MomentRow {
  double value = 0, stderr_ = 0, gaussian_target = 0;
};

struct CltDiagnostics {
  double ks = 0;
  i64 sample_count = 0;
  std::map<int, MomentRow> moments;  // k = 3..6
};

// KS distance to the standard normal CDF plus standardized sample moments
// k = 3..6 with jackknife errors.  Expects samples already standardized.
CltDiagnostics clt_diagnostics(const std::vector<double>& standardized);

// Pair-distance statistics on projected frequencies lambda-hat = lambda/sqrt(n).
double pair_distance_point(const LatticePointSet& set, const IVec& lambda0, double s);
double pair_distance_weighted(const CoefficientVector& cv, double s);
double pair_distance_uniform3(const LatticePointSet& set, double s);

// Ordered pairs of unit vectors at distance <= 1/T, for circle (d=2) or
// sphere (d=3) point sequences.
i64 close_pair_count(const std::vector<std::array<double, 3>>& unit_points,
                     int d, double t_planck);

}  // namespace toral
