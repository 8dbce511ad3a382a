#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "toralmass/lattice.hpp"

namespace toral {

// Exact squared-norm threshold for quasi-correlation windows.  Two forms:
//   rational:  accept q <= num/den            (q = integer squared norm)
//   power:     accept q <= base^(num/den)     (num, den > 0)
// Both comparisons run in exact big-integer arithmetic, so no tuple near the
// boundary is ever mis-counted; approx() is only for reporting.
class NormThreshold {
 public:
  static NormThreshold rational(i64 num, i64 den);
  // K^2 = base^(num/den); used for K = n^{1/2 - delta} windows.
  static NormThreshold power(i64 base, i64 num, i64 den);
  // Parses a decimal string like "12.25" into the exact rational K, so the
  // threshold is K^2 = (num/den)^2.
  static NormThreshold from_decimal_radius(const std::string& text);

  bool accepts(i64 norm_sq) const;  // is 0 < sqrt(q) <= K, given q > 0
  double approx_radius() const;

 private:
  bool is_power_ = false;
  i64 num_ = 0, den_ = 1, base_ = 0;
};

struct CorrelationCounts {
  i64 n = 0;
  int d = 0;
  int l = 0;
  i64 count = 0;        // |S_n(l)|: ordered l-tuples with zero sum
  i64 budget_used = 0;  // hash operations consumed
};

// Exact |S_n(l)| via meet-in-the-middle over integer sum vectors.  Work is
// metered in hash operations against the budget; exceeding it throws
// BudgetError.  When emit is given, every tuple is also streamed to it
// (depth-first with norm pruning), which multiplies the cost accordingly.
CorrelationCounts count_correlations(
    const LatticePointSet& set, int l, u64 budget = 1'000'000'000,
    const std::function<void(const std::vector<IVec>&)>* emit = nullptr);

// Exact |D_n(2k)|: tuples whose multiset splits into k antipodal pairs.
// Closed-form DP in the number of antipodal classes; depends only on N.
i64 count_diagonal(const LatticePointSet& set, int l);

// Quasi-correlations: ordered l-tuples with 0 < |sum| <= K.
CorrelationCounts count_quasi_correlations(const LatticePointSet& set, int l,
                                           const NormThreshold& K,
                                           u64 budget = 1'000'000'000);

struct StructureResult {
  bool admissible = false;
  // Half-sizes of the index classes generated by pairing (2i-1 ~ 2i) and
  // antipodal links (j ~ j' when lambda_j + lambda_j' = 0); each part >= 2,
  // parts sum to l.  Empty when not admissible.
  std::vector<int> parts;
};

StructureResult structure_set(const std::vector<IVec>& tuple,
                              const LatticePointSet& set);

struct HypothesisA {
  bool holds = false;
  i64 violating_count = 0;
  std::optional<std::vector<IVec>> witness;  // one violating tuple, re-verified
  double window = 0;                         // K = n^{1/2-delta}, for reporting
};

// Separateness hypothesis: no length-l quasi-correlations in the window
// K = n^{1/2 - delta}, delta given as the exact rational num/den in (0, 1/2).
HypothesisA check_hypothesis_A(const LatticePointSet& set, int l, i64 delta_num,
                               i64 delta_den, u64 budget = 1'000'000'000);

struct DiagonalDomination {
  i64 count_s = 0;
  i64 count_d = 0;
  double margin = 0;  // (|S| - |D|) / N^{l/2 - gamma}
  bool dominated = false;
};

DiagonalDomination check_diagonal_domination(const LatticePointSet& set, int l,
                                             double gamma,
                                             u64 budget = 1'000'000'000);

}  // namespace toral
