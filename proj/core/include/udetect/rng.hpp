#pragma once

#include <cstdint>

namespace udetect {

// Splittable counter-based generator (SplitMix64 core). Independent streams
// are derived from the (master seed, stream index) pair, never from the
// evolving state, so per-trial streams are reproducible and
// schedule-independent in parallel Monte Carlo runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : origin_(seed), state_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  // Stream derived from (master seed, index); does not disturb this generator.
  Rng stream(std::uint64_t index) const {
    return Rng(mix(origin_ ^ mix(index + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(next_u64() % bound);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t origin_;
  std::uint64_t state_;
};

}  // namespace udetect
