#pragma once

#include <cmath>
#include <cstdint>

namespace vpgeo {

namespace detail {

/// splitmix64 finalizer (Steele, Lea, Flood 2014). The full generator state
/// transition is folded into the caller via the golden-gamma increment, which
/// makes every draw a pure function of (seed, counter).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

}  // namespace detail

/// The i-th 64-bit word of the stream keyed by `seed`. Identical across
/// platforms and compilers; the constants are documented in README.md so the
/// streams can be reproduced outside this library.
inline std::uint64_t stream_u64(std::uint64_t seed, std::uint64_t counter) {
  return detail::splitmix64_mix(seed + (counter + 1) * detail::kGoldenGamma);
}

/// Counter-based random stream. Stateless apart from the position, so draws
/// are reproducible and independent streams are cheap to derive.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return stream_u64(seed_, counter_++); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  /// Uniform in [0, n) by modulo reduction. The bias is below 2^-53 for any
  /// n this library uses (sketch dimensions, scene parameters).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vpgeo
