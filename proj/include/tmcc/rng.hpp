#pragma once

#include <cstdint>

namespace tmcc {

/// Counter-based uniform generator: every variate is a pure function of
/// (seed, counter, lane), so any bit interval can be replayed without
/// regenerating the stream before it.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr std::uint64_t bits(std::uint64_t counter, std::uint32_t lane) const {
    std::uint64_t z = mix(seed_ ^ 0x6a09e667f3bcc909ULL);
    z = mix(z + counter * 0x9e3779b97f4a7c15ULL);
    return mix(z + (static_cast<std::uint64_t>(lane) + 1) * 0xd1b54a32d192ed03ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter, std::uint32_t lane) const {
    return static_cast<double>(bits(counter, lane) >> 11) * 0x1.0p-53;
  }

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace tmcc
