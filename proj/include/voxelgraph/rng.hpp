#pragma once

// Platform-independent random numbers. The standard <random> distributions
// are implementation-defined, so everything seeded in this project goes
// through the generators below instead.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace voxelgraph {

/// SplitMix64 output mix (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential SplitMix64 stream.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  constexpr double uniform() noexcept { return to_unit(next()); }

  /// Unbiased integer in [0, bound); bound must be > 0 (Lemire's method).
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using u128 = unsigned __int128;
    std::uint64_t x = next();
    u128 m = static_cast<u128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<u128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Counter-based generator: every (stream, index) pair maps to an
/// independent value, so voxel noise does not depend on visit order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t bits(std::uint64_t stream,
                               std::uint64_t index) const noexcept {
    return mix64(mix64(seed_ ^ mix64(stream + 0x632be59bd9b4e019ULL)) + index);
  }

  constexpr double uniform(std::uint64_t stream,
                           std::uint64_t index) const noexcept {
    return to_unit(bits(stream, index));
  }

  /// Standard normal via Box-Muller on two derived uniforms.
  double gaussian(std::uint64_t stream, std::uint64_t index) const noexcept {
    const double u1 = 1.0 - to_unit(bits(stream, 2 * index));  // (0, 1]
    const double u2 = to_unit(bits(stream, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace voxelgraph
