#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace toral {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// Integer lattice vector. Used for both d=2 and d=3; the z slot stays 0 in
// the planar case so norms and hashing work uniformly.
using IVec = std::array<i64, 3>;

inline IVec add(const IVec& a, const IVec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline IVec sub(const IVec& a, const IVec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline IVec neg(const IVec& a) { return {-a[0], -a[1], -a[2]}; }
inline i64 dot(const IVec& a, const IVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline i64 norm_sq(const IVec& a) { return dot(a, a); }

struct IVecHash {
  std::size_t operator()(const IVec& v) const noexcept {
    u64 h = 0x9e3779b97f4a7c15ull;
    for (i64 c : v) {
      u64 z = static_cast<u64>(c) + 0x9e3779b97f4a7c15ull + h;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      h = z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
  }
};

// Input failed a documented precondition. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A work or subdivision budget was exhausted before the result converged.
// CLI maps this to exit code 2.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& invariant) {
  if (!cond) throw ValidationError(invariant);
}

}  // namespace toral
