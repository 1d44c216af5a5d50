#pragma once

#include <cstdint>
#include <random>

namespace lmm {

// Stream tags so one replication seed can fan out into independent
// generators (path noise, observation noise, optimizer starts, ...).
inline constexpr std::uint64_t kStreamWiener = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamOptimizer = 3;
inline constexpr std::uint64_t kStreamOptimizerLga = 4;

// splitmix64-style mix of (base, stream) into a well-spread 64-bit seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace lmm
