#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensorprobe/numeric.hpp"
#include "tensorprobe/rng.hpp"

namespace tensorprobe {

// Probe entry law. Both are zero-mean, unit-variance, i.i.d. entries; they
// differ in the fourth moment, which is what the variance formulas consume.
enum class ProbeDistribution { kRademacher, kGaussian };

inline double fourth_moment(ProbeDistribution d) {
  return d == ProbeDistribution::kRademacher ? 1.0 : 3.0;
}

inline const char* to_string(ProbeDistribution d) {
  return d == ProbeDistribution::kRademacher ? "rademacher" : "gaussian";
}

inline ProbeDistribution parse_distribution(const std::string& s) {
  if (s == "rademacher") return ProbeDistribution::kRademacher;
  if (s == "gaussian") return ProbeDistribution::kGaussian;
  throw std::invalid_argument("unknown distribution '" + s + "' (expected rademacher or gaussian)");
}

// One estimator input: the probe vectors for the contracted modes plus their
// elementwise product, which weights the contraction result.
struct ProbeSet {
  std::vector<std::vector<double>> probes;
  std::vector<double> combined;
  ProbeDistribution distribution;
  std::uint64_t seed = 0;
};

// Explicit probes (basis vectors, enumeration patterns, files).
inline ProbeSet make_probe_set(ProbeDistribution dist, std::vector<std::vector<double>> probes,
                               std::uint64_t seed = 0) {
  if (probes.empty()) throw std::invalid_argument("make_probe_set: at least one probe required");
  ProbeSet ps;
  ps.combined = hadamard(std::span<const std::vector<double>>(probes));
  ps.probes = std::move(probes);
  ps.distribution = dist;
  ps.seed = seed;
  return ps;
}

// Draws n_probes vectors of length dim from one SplitMix64 stream seeded with
// `seed`, probe-major then entry-major. Same seed, same set, on any platform.
inline ProbeSet sample_probe_set(ProbeDistribution dist, int dim, int n_probes,
                                 std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sample_probe_set: dim must be at least 1");
  if (n_probes < 1) throw std::invalid_argument("sample_probe_set: need at least one probe");
  SplitMix64 gen(seed);
  std::vector<std::vector<double>> probes(static_cast<std::size_t>(n_probes),
                                          std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& g : probes)
    for (auto& x : g)
      x = dist == ProbeDistribution::kRademacher ? gen.next_rademacher() : gen.next_gaussian();
  return make_probe_set(dist, std::move(probes), seed);
}

}  // namespace tensorprobe
