#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "tensorprobe/estimators.hpp"
#include "tensorprobe/probes.hpp"

namespace tensorprobe {

enum class Aggregator { kMean, kMedianOfMeans };

inline const char* to_string(Aggregator a) {
  return a == Aggregator::kMean ? "mean" : "mom";
}

inline Aggregator parse_aggregator(const std::string& s) {
  if (s == "mean") return Aggregator::kMean;
  if (s == "mom" || s == "median-of-means") return Aggregator::kMedianOfMeans;
  throw std::invalid_argument("unknown aggregator '" + s + "' (expected mean or mom)");
}

// Scalar summaries the query-count formulas consume. slice_sumsq and
// diag_entry describe a single target index i and are only read for
// diagonal targets: slice_sumsq = sum over (j_1..j_{N-1}) of a(j,...,i)^2.
struct TensorStats {
  int order = 0;
  double frobenius_sq = 0.0;
  double diag_sumsq = 0.0;
  double trace = 0.0;
  double slice_sumsq = 0.0;
  double diag_entry = 0.0;
};

struct SampleSizeBound {
  EstimateKind target;
  ProbeDistribution distribution;
  Aggregator aggregator;
  double epsilon = 0.0;
  double delta = 0.0;
  double r_const = 1.0;       // hypercontractivity constant; results scale with it
  double variance_term = 0.0; // the variance mass the bound multiplies
  std::int64_t k = 0;
  std::optional<std::int64_t> r_groups;  // median-of-means group count
};

// Query-count guarantee for |estimate - target| <= eps*|target| with
// probability 1-delta.
//
// Mean aggregator: K = ceil(2 R * mass * (2+ln(1/delta))^(2(N-1)) / (eps*target)^2),
// where mass is the exact variance for Rademacher probes and the variance
// upper bound for Gaussian probes.
//
// Median of means: K = ceil(32 * varbound * ln(1/delta) / (eps*target)^2)
// rounded up to a multiple of r = ceil(8 ln(1/delta)); varbound keeps its own
// leading constants, so the Rademacher trace case reads 64(F - D).
inline SampleSizeBound sample_size_bound(EstimateKind target, ProbeDistribution dist,
                                         Aggregator agg, const TensorStats& stats, double eps,
                                         double delta, double r_const = 1.0) {
  if (stats.order < 2) throw std::invalid_argument("sample_size_bound: order must be at least 2");
  if (!(eps > 0.0)) throw std::invalid_argument("sample_size_bound: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sample_size_bound: delta must lie in (0,1)");
  if (!(r_const > 0.0)) throw std::invalid_argument("sample_size_bound: R must be positive");

  const int n = stats.order;
  const double three_pow = std::pow(3.0, n - 1);
  const double diag_sq = stats.diag_entry * stats.diag_entry;

  double target_sq = 0.0;
  double mass = 0.0;      // mean-aggregator variance mass (leading 2 shared)
  double varbound = 0.0;  // full variance bound for the MoM route
  if (target == EstimateKind::kDiagonal) {
    target_sq = diag_sq;
    if (dist == ProbeDistribution::kRademacher) {
      mass = stats.slice_sumsq - diag_sq;
      varbound = mass;
    } else {
      mass = (three_pow - 1.0) * diag_sq +
             std::pow(3.0, n - 2) * (stats.slice_sumsq - diag_sq);
      varbound = mass;
    }
  } else {
    target_sq = stats.trace * stats.trace;
    if (dist == ProbeDistribution::kRademacher) {
      mass = stats.frobenius_sq - stats.diag_sumsq;
      varbound = 2.0 * mass;
    } else {
      mass = (three_pow - 1.0) * stats.frobenius_sq;
      varbound = mass;
    }
  }
  if (target_sq == 0.0)
    throw std::domain_error("sample_size_bound: relative guarantee undefined for zero target");
  if (mass < 0.0) mass = 0.0;
  if (varbound < 0.0) varbound = 0.0;

  const double log_term = std::log(1.0 / delta);
  SampleSizeBound out;
  out.target = target;
  out.distribution = dist;
  out.aggregator = agg;
  out.epsilon = eps;
  out.delta = delta;
  out.r_const = r_const;
  out.variance_term = agg == Aggregator::kMean ? mass : varbound;

  if (agg == Aggregator::kMean) {
    const double exponent = 2.0 * static_cast<double>(n - 1);
    const double raw =
        2.0 * r_const * mass * std::pow(2.0 + log_term, exponent) / (eps * eps * target_sq);
    out.k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
  } else {
    const std::int64_t r = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(8.0 * log_term)));
    const double raw = 32.0 * varbound * log_term / (eps * eps * target_sq);
    std::int64_t k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
    k = ((k + r - 1) / r) * r;
    out.k = k;
    out.r_groups = r;
  }
  return out;
}

}  // namespace tensorprobe
