#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sdnet {

/// Every stochastic routine in the library draws from this engine.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed derivation: the master seed and the hash of a canonical
/// key are folded together, then each counter is folded in turn through
/// splitmix64. Stable across platforms and versions.
template <typename... Counters>
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view key,
                                    Counters... counters) {
  std::uint64_t s = splitmix64(master ^ splitmix64(fnv1a64(key)));
  ((s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(counters) + 1))), ...);
  return s;
}

/// Uniform double on [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer on [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace sdnet
