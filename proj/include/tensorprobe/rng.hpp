#pragma once

#include <cmath>
#include <cstdint>

namespace tensorprobe {

// splitmix64 finalizer: a 64-bit bijection.
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//   z *= 0x94D049BB133111EB; z ^= z >> 31;
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for (base, run, sample). Each stage adds GOLDEN*(index+1) and
// applies mix64, so distinct indices land in distinct finalizer inputs.
// Pure function of its arguments; identical on every platform.
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t derive_run_seed(std::uint64_t base, std::uint64_t run,
                                        std::uint64_t sample) {
  std::uint64_t h = mix64(base + kGoldenGamma * (run + 1));
  h = mix64(h + kGoldenGamma * (sample + 1));
  return h;
}

// splitmix64 sequence generator. Bit-exact across platforms: state advances
// by the golden-gamma increment, output is mix64 of the new state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return mix64(state_ += kGoldenGamma); }

  // Uniform in [0,1) from the top 53 bits of one output.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // +1 when the top bit of one output is 0, else -1.
  double next_rademacher() { return (next_u64() >> 63) ? -1.0 : 1.0; }

  // Marsaglia polar method. Consumes uniforms in pairs (u first, then v),
  // rejecting until 0 < u^2+v^2 < 1; returns u*f and caches v*f for the
  // next call, where f = sqrt(-2 ln(s)/s).
  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tensorprobe
