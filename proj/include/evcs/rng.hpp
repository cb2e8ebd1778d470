#pragma once

#include <cstdint>
#include <random>

namespace evcs {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a master seed and a stream tag so
// that e.g. scenario sampling and exploration noise never share a sequence.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(uint64_t seed, uint64_t stream) { return Rng(mix_seed(seed, stream)); }

}  // namespace evcs
