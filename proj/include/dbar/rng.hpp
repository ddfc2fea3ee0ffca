#ifndef DBAR_RNG_HPP
#define DBAR_RNG_HPP

#include <cstdint>

namespace dbar {

/// Counter-based randomness keyed by absolute time: one uniform per
/// (seed, replica, t) with 53 bits of precision, the same value on every
/// evaluation.  Stateless by construction, so backtracking to arbitrary
/// (including negative) time indices is reproducible and replicas with
/// distinct ids give independent-quality streams.
struct TimeKeyedRandomness {
  uint64_t seed = 0;
  uint64_t replica = 0;

  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  /// 64-bit finalizer from the splitmix family; a bijective mixer.
  static constexpr uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  constexpr uint64_t word_at(int64_t t) const {
    uint64_t z = seed + kGolden;
    z = mix(z ^ mix(replica + 0xD1B54A32D192ED03ull));
    z = mix(z ^ mix(static_cast<uint64_t>(t) * kGolden + 0x8CB92BA72F3D8DD7ull));
    return z;
  }

  /// Uniform on [0,1) with 53 significant bits.
  constexpr double uniform_at(int64_t t) const {
    return static_cast<double>(word_at(t) >> 11) * 0x1.0p-53;
  }

  TimeKeyedRandomness with_replica(uint64_t r) const {
    return TimeKeyedRandomness{seed, r};
  }
};

}  // namespace dbar

#endif  // DBAR_RNG_HPP
