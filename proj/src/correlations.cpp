#include "toralmass/correlations.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace toral {

namespace {

using boost::multiprecision::cpp_int;

cpp_int ipow(cpp_int base, i64 e) {
  cpp_int r = 1;
  while (e-- > 0) r *= base;
  return r;
}

using SumMap = std::unordered_map<IVec, i64, IVecHash>;

// All k-fold sums over the set, with multiplicities, by iterated
// convolution.  Each map update is one budget operation.
SumMap k_fold_sums(const LatticePointSet& set, int k, u64 budget, u64* used) {
  SumMap cur;
  cur[{0, 0, 0}] = 1;
  for (int stage = 0; stage < k; ++stage) {
    SumMap next;
    next.reserve(cur.size() * 4);
    for (const auto& [vec, cnt] : cur) {
      for (const IVec& p : set.points()) {
        if (++*used > budget) throw BudgetError("correlations: hash operation budget exhausted");
        next[add(vec, p)] += cnt;
      }
    }
    cur.swap(next);
  }
  return cur;
}

// Depth-first tuple emission with triangle-inequality pruning: a partial sum
// farther than (remaining slots) * sqrt(n) can never return to zero.
void emit_tuples_dfs(const LatticePointSet& set, int l, u64 budget, u64* used,
                     std::vector<IVec>* tuple,
                     const std::function<void(const std::vector<IVec>&)>& emit) {
  const int depth = static_cast<int>(tuple->size());
  IVec partial{0, 0, 0};
  for (const IVec& v : *tuple) partial = add(partial, v);
  if (depth == l - 1) {
    const IVec need = neg(partial);
    if (++*used > budget) throw BudgetError("correlations: hash operation budget exhausted");
    if (set.contains(need)) {
      tuple->push_back(need);
      emit(*tuple);
      tuple->pop_back();
    }
    return;
  }
  const i64 remaining = l - depth;
  for (const IVec& p : set.points()) {
    if (++*used > budget) throw BudgetError("correlations: hash operation budget exhausted");
    const IVec s = add(partial, p);
    const double reach = static_cast<double>(remaining - 1) *
                         std::sqrt(static_cast<double>(set.n()));
    if (std::sqrt(static_cast<double>(norm_sq(s))) > reach + 1e-9) continue;
    tuple->push_back(p);
    emit_tuples_dfs(set, l, budget, used, tuple, emit);
    tuple->pop_back();
  }
}

}  // namespace

NormThreshold NormThreshold::rational(i64 num, i64 den) {
  require(num >= 0 && den >= 1, "threshold: K^2 must be a nonnegative rational");
  NormThreshold t;
  t.num_ = num;
  t.den_ = den;
  return t;
}

NormThreshold NormThreshold::power(i64 base, i64 num, i64 den) {
  require(base >= 1 && num >= 0 && den >= 1, "threshold: base^(num/den) needs positive parts");
  NormThreshold t;
  t.is_power_ = true;
  t.base_ = base;
  t.num_ = num;
  t.den_ = den;
  return t;
}

NormThreshold NormThreshold::from_decimal_radius(const std::string& text) {
  // "12.25" -> K = 1225/100 -> K^2 = 1225^2 / 100^2, exactly.
  require(!text.empty(), "threshold: empty radius");
  const auto dot = text.find('.');
  std::string digits = text;
  i64 scale = 1;
  if (dot != std::string::npos) {
    digits = text.substr(0, dot) + text.substr(dot + 1);
    for (std::size_t i = dot + 1; i < text.size(); ++i) scale *= 10;
  }
  i64 value = 0;
  const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  require(ec == std::errc() && p == digits.data() + digits.size() && value >= 0,
          "threshold: radius must be a nonnegative decimal number");
  require(scale <= 1'000'000'000, "threshold: too many decimal places");
  return rational(value * value, scale * scale);
}

bool NormThreshold::accepts(i64 q) const {
  require(q > 0, "threshold: squared norm must be positive");
  if (!is_power_) {
    // q <= num/den  <=>  q * den <= num
    return cpp_int(q) * den_ <= cpp_int(num_);
  }
  // q <= base^(num/den)  <=>  q^den <= base^num
  return ipow(cpp_int(q), den_) <= ipow(cpp_int(base_), num_);
}

double NormThreshold::approx_radius() const {
  if (!is_power_)
    return std::sqrt(static_cast<double>(num_) / static_cast<double>(den_));
  return std::sqrt(std::pow(static_cast<double>(base_),
                            static_cast<double>(num_) / static_cast<double>(den_)));
}

CorrelationCounts count_correlations(
    const LatticePointSet& set, int l, u64 budget,
    const std::function<void(const std::vector<IVec>&)>* emit) {
  require(l >= 2, "correlations: l must be >= 2");
  CorrelationCounts out;
  out.n = set.n();
  out.d = set.dim();
  out.l = l;
  u64 used = 0;
  const int a = l / 2, b = l - l / 2;
  SumMap left = k_fold_sums(set, a, budget, &used);
  SumMap right = (a == b) ? left : k_fold_sums(set, b, budget, &used);
  i64 total = 0;
  for (const auto& [vec, cnt] : left) {
    if (++used > budget) throw BudgetError("correlations: hash operation budget exhausted");
    auto it = right.find(neg(vec));
    if (it != right.end()) total += cnt * it->second;
  }
  out.count = total;
  if (emit != nullptr && total > 0) {
    std::vector<IVec> tuple;
    emit_tuples_dfs(set, l, budget, &used, &tuple, *emit);
  }
  out.budget_used = static_cast<i64>(used);
  return out;
}

i64 count_diagonal(const LatticePointSet& set, int l) {
  require(l >= 2 && l % 2 == 0, "diagonal count: l must be even and >= 2");
  const int k = l / 2;
  require(k <= 6, "diagonal count: l/2 beyond the supported table");
  const i64 m = static_cast<i64>(set.size()) / 2;  // antipodal classes
  require(static_cast<i64>(set.size()) % 2 == 0, "diagonal count: set must be antipodally closed");

  // dp[t] = number of balanced tuples of length 2t drawn from the classes
  // processed so far, counting position choices: a class contributing j
  // balanced pairs into 2t open slots adds C(2t, 2j) * C(2j, j) ways.
  auto binom = [](i64 nn, i64 kk) {
    i64 r = 1;
    for (i64 i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
    return r;
  };
  std::vector<i64> dp(static_cast<std::size_t>(k) + 1, 0);
  dp[0] = 1;
  for (i64 c = 0; c < m; ++c) {
    for (int t = k; t >= 1; --t) {
      i64 acc = dp[static_cast<std::size_t>(t)];
      for (int j = 1; j <= t; ++j) {
        const i64 ways = binom(2 * t, 2 * j) * binom(2 * j, j);
        acc += dp[static_cast<std::size_t>(t - j)] * ways;
      }
      dp[static_cast<std::size_t>(t)] = acc;
    }
  }
  return dp[static_cast<std::size_t>(k)];
}

CorrelationCounts count_quasi_correlations(const LatticePointSet& set, int l,
                                           const NormThreshold& K, u64 budget) {
  require(l >= 2, "quasi: l must be >= 2");
  CorrelationCounts out;
  out.n = set.n();
  out.d = set.dim();
  out.l = l;
  u64 used = 0;
  const int a = l / 2, b = l - l / 2;
  SumMap left = k_fold_sums(set, a, budget, &used);
  SumMap right = (a == b) ? left : k_fold_sums(set, b, budget, &used);
  i64 total = 0;
  for (const auto& [va, ca] : left) {
    for (const auto& [vb, cb] : right) {
      if (++used > budget) throw BudgetError("correlations: hash operation budget exhausted");
      const IVec s = add(va, vb);
      const i64 q = norm_sq(s);
      if (q == 0) continue;
      if (K.accepts(q)) total += ca * cb;
    }
  }
  out.count = total;
  out.budget_used = static_cast<i64>(used);
  return out;
}

StructureResult structure_set(const std::vector<IVec>& tuple,
                              const LatticePointSet& set) {
  StructureResult res;
  const std::size_t l = tuple.size();
  require(l >= 2 && l % 2 == 0, "structure: tuple length must be even");
  for (const IVec& v : tuple) require(set.contains(v), "structure: entry outside the set");

  // Admissible needs membership in D (balanced antipodal multiset) and no
  // antipodal pair within a consecutive (2i-1, 2i) slot.
  std::unordered_map<IVec, i64, IVecHash> balance;
  for (const IVec& v : tuple) {
    // count +1 on the class representative, -1 on its negation
    const IVec r = std::min(v, neg(v));
    balance[r] += (v == r) ? 1 : -1;
  }
  for (const auto& [vec, bal] : balance)
    if (bal != 0) return res;
  for (std::size_t i = 0; i + 1 < l; i += 2)
    if (tuple[i] == neg(tuple[i + 1])) return res;
  res.admissible = true;

  std::vector<int> parent(l);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int x, int y) { parent[static_cast<std::size_t>(find(x))] = find(y); };
  for (std::size_t i = 0; i + 1 < l; i += 2) unite(static_cast<int>(i), static_cast<int>(i + 1));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j)
      if (norm_sq(add(tuple[i], tuple[j])) == 0) unite(static_cast<int>(i), static_cast<int>(j));

  std::unordered_map<int, int> size;
  for (std::size_t i = 0; i < l; ++i) ++size[find(static_cast<int>(i))];
  for (const auto& [root, s] : size) {
    require(s % 2 == 0, "structure: class sizes must be even");
    res.parts.push_back(s / 2);
  }
  std::sort(res.parts.begin(), res.parts.end());
  return res;
}

HypothesisA check_hypothesis_A(const LatticePointSet& set, int l, i64 delta_num,
                               i64 delta_den, u64 budget) {
  require(delta_num >= 1 && delta_den >= 1 && 2 * delta_num < delta_den,
          "hypothesis_A: delta must be a rational in (0, 1/2)");
  // K = n^{1/2 - delta}  =>  K^2 = n^{(den - 2 num)/den}
  const NormThreshold K = NormThreshold::power(set.n(), delta_den - 2 * delta_num, delta_den);
  HypothesisA res;
  res.window = K.approx_radius();
  CorrelationCounts qc = count_quasi_correlations(set, l, K, budget);
  res.violating_count = qc.count;
  res.holds = qc.count == 0;
  if (!res.holds) {
    // Recover one violating tuple depth-first and re-verify it exactly.
    std::vector<IVec> tuple(static_cast<std::size_t>(l));
    const double sqrt_n = std::sqrt(static_cast<double>(set.n()));
    const double window = K.approx_radius();
    std::function<bool(int, IVec)> dfs = [&](int depth, IVec partial) -> bool {
      if (depth == l) {
        const i64 q = norm_sq(partial);
        return q > 0 && K.accepts(q);
      }
      // partial sums that cannot come back inside the window are dead ends
      const double reach = static_cast<double>(l - depth) * sqrt_n;
      if (std::sqrt(static_cast<double>(norm_sq(partial))) > reach + window + 1e-9)
        return false;
      for (const IVec& p : set.points()) {
        tuple[static_cast<std::size_t>(depth)] = p;
        if (dfs(depth + 1, add(partial, p))) return true;
      }
      return false;
    };
    if (dfs(0, {0, 0, 0})) {
      const IVec s = std::accumulate(tuple.begin(), tuple.end(), IVec{0, 0, 0},
                                     [](IVec a, const IVec& b) { return add(a, b); });
      require(norm_sq(s) > 0 && K.accepts(norm_sq(s)), "hypothesis_A: witness re-verification");
      res.witness = tuple;
    }
  }
  return res;
}

DiagonalDomination check_diagonal_domination(const LatticePointSet& set, int l,
                                             double gamma, u64 budget) {
  require(l % 2 == 0, "diagonal domination: l must be even");
  DiagonalDomination res;
  res.count_s = count_correlations(set, l, budget).count;
  res.count_d = count_diagonal(set, l);
  const double scale = std::pow(static_cast<double>(set.size()),
                                static_cast<double>(l) / 2.0 - gamma);
  res.margin = static_cast<double>(res.count_s - res.count_d) / scale;
  res.dominated = res.count_s == res.count_d;
  return res;
}

}  // namespace toral
