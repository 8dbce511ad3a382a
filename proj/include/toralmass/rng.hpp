#pragma once

#include "toralmass/common.hpp"

namespace toral {

// Counter-based generator: every draw is a pure function of
// (seed, stream, slot), so parallel consumers can pull the value for any
// index without sharing state and the output never depends on thread
// scheduling.  Three rounds of the splitmix64 finalizer give plenty of
// avalanche for Monte Carlo use.

inline u64 mix64(u64 z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline u64 rng_at(u64 seed, u64 stream, u64 slot) {
  return mix64(mix64(mix64(seed) ^ stream) + slot);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(u64 bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Reserved stream ids so distinct consumers never collide on (stream, slot).
namespace rng_stream {
constexpr u64 kSigns = 0x5349474eull;        // coefficient sign draws, slot = orbit index
constexpr u64 kMcSample = 0x53414d50ull;     // sample positions, slot = sample*8 + attempt*dim...
constexpr u64 kCapCentre = 0x43415053ull;    // sampled cap centres
constexpr u64 kCalibration = 0x43414c42ull;  // test-side draws
}  // namespace rng_stream

}  // namespace toral
