#pragma once
// Self-contained 64-bit generator so that runs are reproducible across
// compilers and standard libraries (std::uniform_int_distribution is not).
//
// Stream contract: every run owns exactly one stream, seeded by
// derive(master_seed, instance_index). All stochastic choices of a run
// consume this stream in the order documented in dynamics.hpp.

#include <cstdint>

namespace icfsim {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Stream seed = two mix rounds over master and instance; instances of the
  // same master seed get independent streams.
  static SplitMix64 derive(std::uint64_t master_seed, std::uint64_t instance) {
    return SplitMix64(mix(mix(master_seed) + 0x9e3779b97f4a7c15ULL * (instance + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Unbiased integer in [0, n) (Lemire rejection method). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_double() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace icfsim
