#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "toralmass/common.hpp"

namespace toral {

// Lattice points of squared norm n in dimension d (2 or 3), i.e. the
// frequency set of a toral eigenfunction with eigenvalue 4*pi^2*n.
//
// Canonical order: d=2 ascending angle starting at angle 0 (the comparator
// uses exact integer cross products, so near-ties cannot be misordered);
// d=3 lexicographic ascending on (x, y, z).
class LatticePointSet {
 public:
  static LatticePointSet enumerate(i64 n, int d);

  i64 n() const { return n_; }
  int dim() const { return d_; }
  std::size_t size() const { return pts_.size(); }
  const std::vector<IVec>& points() const { return pts_; }

  // Angles in [0, 2*pi), aligned with points(); d=2 only.
  const std::vector<double>& angles() const;

  bool contains(const IVec& v) const { return index_.count(v) != 0; }
  std::size_t index_of(const IVec& v) const;

  // Clockwise nearest neighbour: the set member whose angle precedes this
  // point's, wrapping around 2*pi.  d=2 only.
  IVec clockwise_successor(const IVec& v) const;

 private:
  i64 n_ = 0;
  int d_ = 0;
  std::vector<IVec> pts_;
  std::vector<double> angles_;
  std::unordered_map<IVec, std::size_t, IVecHash> index_;
};

// True iff n is representable, i.e. the point set is non-empty.  For d=3
// this is false exactly on n of the form 4^a(8b+7).
bool is_sum_of_squares(i64 n, int d);

struct DiscrepancyWitness {
  // d=2: arc from angle a to angle b counterclockwise; d=3: cap with unit
  // centre (cx, cy, cz) and chordal radius rad.
  double a = 0, b = 0;
  std::array<double, 3> centre{0, 0, 0};
  double rad = 0;
  bool closed_low = true, closed_high = true;  // endpoint inclusion (d=2)
  bool boundary_included = true;               // cap boundary inclusion (d=3)
  i64 count = 0;                               // points captured by the witness
};

struct DiscrepancyResult {
  double value = 0;
  bool exact = false;
  DiscrepancyWitness witness;
};

// Supremum over closed arcs of |#(E_n in arc)/N - arclength/(2*pi)|, the
// angular equidistribution discrepancy.  Exact: a supremum over arcs is
// always attained (or approached) with both endpoints at data angles, each
// side evaluated in closed and limiting-open form, so scanning all O(N^2)
// endpoint pairs suffices.
DiscrepancyResult angular_discrepancy(const LatticePointSet& set);

struct HypothesisD {
  bool holds = false;
  double delta = 0;      // measured discrepancy
  double threshold = 0;  // (log n)^(-(1/2) log(pi/2) + eps)
  double margin = 0;     // threshold - delta
};

// Logarithmic decay hypothesis for the angular discrepancy.  Requires n >= 3
// so that log n > 1 and the power threshold is monotone in the exponent.
HypothesisD check_hypothesis_D(const LatticePointSet& set, double eps);

enum class CapMode { kExact, kSampled };

// Supremum over spherical caps of |#(projected E_n in cap)/N - r^2/4| where
// r is the chordal radius (so r^2/4 is the normalised cap area).  Exact mode
// scans every locally extremal cap axis: data directions, pairwise sum
// directions, and circumcentre axes of point triples (all exact integer
// directions), with the radius sweep evaluated in closed and limiting-open
// form per distinct distance group.  Cost O(N^4 log N); refused above
// exact_bound points.  Sampled mode lower-bounds the supremum from uniformly
// drawn centres with the same per-axis radius sweep.
DiscrepancyResult spherical_cap_discrepancy(const LatticePointSet& set,
                                            CapMode mode,
                                            i64 samples = 4096,
                                            u64 seed = 1,
                                            std::size_t exact_bound = 200);

}  // namespace toral
