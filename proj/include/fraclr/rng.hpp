#pragma once

// Counter-based deterministic noise source. SplitMix64 is used as a stateless
// hash of (seed, stream, index), so any coefficient of any test field can be
// regenerated independently and the corpus is bitwise reproducible across
// platforms and thread counts. No transcendental sampling is involved.

#include <cstdint>

namespace fraclr {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform in [-1, 1), a pure function of (seed, stream, index).
inline double uniform_pm1(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t x = splitmix64(seed ^ splitmix64(stream ^ splitmix64(index)));
  return static_cast<double>(x >> 11) * 0x1p-52 - 1.0;
}

}  // namespace fraclr
