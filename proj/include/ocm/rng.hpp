#pragma once

// Counter-based randomness. Every random number in the library is a pure hash
// of (master seed, stream tag, coordinates...), so any piece of the random
// environment can be regenerated independently and in any order.

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ocm::rng {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
  Arrows = 0xA1,
  EdgeWeights = 0xB2,
  WalkWeights = 0xC3,
  Sampling = 0xD4,
};

template <class... Words>
constexpr std::uint64_t hash(std::uint64_t seed, Stream stream, Words... words) noexcept {
  std::uint64_t h = mix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xd1342543de82ef95ULL));
  ((h = mix64(h ^ static_cast<std::uint64_t>(words))), ...);
  return h;
}

/// Uniform on the open interval (0,1) with 53 bits of resolution.
inline double uniform_open(std::uint64_t h) noexcept {
  // The top value would round up to 1.0.
  return std::min((static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53, 0x1.fffffffffffffp-1);
}

/// Mean-one exponential.
inline double exponential(std::uint64_t h) noexcept { return -std::log(uniform_open(h)); }

/// Sequential generator for sampling tasks (query points, replicate seeds).
/// Avoids std::*_distribution so draws are identical across standard libraries.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return uniform_open(next()); }

  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ocm::rng
