#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensorprobe/numeric.hpp"
#include "tensorprobe/oracle.hpp"
#include "tensorprobe/probes.hpp"
#include "tensorprobe/rng.hpp"

namespace tensorprobe {

enum class EstimateKind { kTrace, kDiagonal };

inline const char* to_string(EstimateKind k) {
  return k == EstimateKind::kTrace ? "trace" : "diag";
}

inline EstimateKind parse_estimate_kind(const std::string& s) {
  if (s == "trace") return EstimateKind::kTrace;
  if (s == "diag" || s == "diagonal") return EstimateKind::kDiagonal;
  throw std::invalid_argument("unknown target '" + s + "' (expected trace or diag)");
}

// One-sample diagonal estimate: the combined probe times the contraction of
// the leading modes. Unbiased for the diagonal because cross terms carry at
// least one odd probe-entry power.
inline std::vector<double> estimate_diagonal_once(const TensorOracle& oracle,
                                                  const ProbeSet& ps) {
  const auto v = oracle.contract_all_but_last(ps.probes);
  return hadamard(ps.combined, v);
}

inline double trace_from_diagonal_estimate(std::span<const double> y) {
  return pairwise_sum(y);
}

// One-sample trace estimate; by construction it equals the sum of the
// one-sample diagonal estimate for the same probes.
inline double estimate_trace_once(const TensorOracle& oracle, const ProbeSet& ps) {
  const auto y = estimate_diagonal_once(oracle, ps);
  return trace_from_diagonal_estimate(y);
}

// Both targets from a single contraction query.
struct BothEstimates {
  std::vector<double> diagonal;
  double trace = 0.0;
};

inline BothEstimates estimate_both_once(const TensorOracle& oracle, const ProbeSet& ps) {
  BothEstimates out;
  out.diagonal = estimate_diagonal_once(oracle, ps);
  out.trace = trace_from_diagonal_estimate(out.diagonal);
  return out;
}

// Median of r disjoint contiguous group means. Group size is n/r; n must be
// divisible by r. Even r takes the mean of the two middle group means.
inline double aggregate_median_of_means(std::span<const double> samples, int r) {
  if (r < 1) throw std::invalid_argument("aggregate_median_of_means: need at least one group");
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("aggregate_median_of_means: empty sample list");
  if (n % static_cast<std::size_t>(r) != 0)
    throw std::invalid_argument(
        "aggregate_median_of_means: sample count " + std::to_string(n) +
        " is not divisible into " + std::to_string(r) +
        " equal groups; pick K as a multiple of r");
  const std::size_t s = n / static_cast<std::size_t>(r);
  std::vector<double> means(static_cast<std::size_t>(r));
  for (std::size_t g = 0; g < means.size(); ++g) {
    const auto group = samples.subspan(g * s, s);
    means[g] = pairwise_sum(group) / static_cast<double>(s);
  }
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  if (means.size() % 2 == 1) return means[mid];
  return 0.5 * (means[mid - 1] + means[mid]);
}

template <typename Value>
struct EstimateSeries {
  std::vector<Value> samples;
  Value mean{};
  std::optional<Value> median_of_means;
  std::uint64_t queries_used = 0;
  std::uint64_t base_seed = 0;
};

using TraceSeries = EstimateSeries<double>;
using DiagonalSeries = EstimateSeries<std::vector<double>>;

// K independent samples with per-sample stream seeds
// derive_run_seed(base_seed, run_index, k).
inline TraceSeries run_trace_samples(const TensorOracle& oracle, ProbeDistribution dist, int k,
                                     std::uint64_t base_seed, std::uint64_t run_index = 0,
                                     std::optional<int> mom_groups = {}) {
  if (k < 1) throw std::invalid_argument("run_trace_samples: K must be at least 1");
  const std::uint64_t before = oracle.query_count();
  TraceSeries series;
  series.base_seed = base_seed;
  series.samples.resize(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    const auto ps = sample_probe_set(dist, oracle.dim(), oracle.order() - 1,
                                     derive_run_seed(base_seed, run_index,
                                                     static_cast<std::uint64_t>(s)));
    series.samples[static_cast<std::size_t>(s)] = estimate_trace_once(oracle, ps);
  }
  series.mean = pairwise_sum(series.samples) / static_cast<double>(k);
  if (mom_groups) series.median_of_means = aggregate_median_of_means(series.samples, *mom_groups);
  series.queries_used = oracle.query_count() - before;
  return series;
}

inline DiagonalSeries run_diagonal_samples(const TensorOracle& oracle, ProbeDistribution dist,
                                           int k, std::uint64_t base_seed,
                                           std::uint64_t run_index = 0,
                                           std::optional<int> mom_groups = {}) {
  if (k < 1) throw std::invalid_argument("run_diagonal_samples: K must be at least 1");
  const std::size_t d = static_cast<std::size_t>(oracle.dim());
  const std::uint64_t before = oracle.query_count();
  DiagonalSeries series;
  series.base_seed = base_seed;
  series.samples.resize(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    const auto ps = sample_probe_set(dist, oracle.dim(), oracle.order() - 1,
                                     derive_run_seed(base_seed, run_index,
                                                     static_cast<std::uint64_t>(s)));
    series.samples[static_cast<std::size_t>(s)] = estimate_diagonal_once(oracle, ps);
  }
  series.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    series.mean[i] = pairwise_sum(series.samples.size(), [&](std::size_t s) {
                       return series.samples[s][i];
                     }) /
                     static_cast<double>(k);
  if (mom_groups) {
    std::vector<double> mom(d);
    std::vector<double> coord(series.samples.size());
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t s = 0; s < series.samples.size(); ++s) coord[s] = series.samples[s][i];
      mom[i] = aggregate_median_of_means(coord, *mom_groups);
    }
    series.median_of_means = std::move(mom);
  }
  series.queries_used = oracle.query_count() - before;
  return series;
}

}  // namespace tensorprobe
