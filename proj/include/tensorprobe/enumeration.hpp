#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/estimators.hpp"
#include "tensorprobe/numeric.hpp"
#include "tensorprobe/oracle.hpp"
#include "tensorprobe/probes.hpp"
#include "tensorprobe/rng.hpp"
#include "tensorprobe/threading.hpp"

namespace tensorprobe {

struct EnumeratedMoments {
  std::vector<double> diag_mean;
  std::vector<double> diag_var;
  std::vector<std::vector<double>> diag_cov;  // full d x d, cov[i][i] = var
  double trace_mean = 0.0;
  double trace_var = 0.0;
};

namespace detail {

// Per-chunk raw sums of the estimator outputs and their products.
struct MomentSums {
  std::vector<double> y;
  std::vector<double> yy;  // upper triangle, row-major: (p,q), q >= p
  double x = 0.0;
  double xx = 0.0;
};

inline std::size_t tri_index(std::size_t d, std::size_t p, std::size_t q) {
  // q >= p
  return p * d - p * (p + 1) / 2 + q;
}

}  // namespace detail

// Exact estimator moments under the sign-probe law by full enumeration of all
// 2^(d(N-1)) probe sign patterns. Bit b of the pattern sets probe t = b/d,
// entry j = b%d, with a set bit meaning -1. The pattern budget d(N-1) <= 24.
inline EnumeratedMoments enumerate_rademacher_exact(const DenseTensor& t, unsigned threads = 1) {
  const std::size_t d = static_cast<std::size_t>(t.dim());
  const std::size_t n_probes = static_cast<std::size_t>(t.order() - 1);
  const std::size_t bits = d * n_probes;
  if (bits > 24)
    throw std::invalid_argument("enumerate_rademacher_exact: dim*(order-1) must not exceed 24");
  const std::size_t n_patterns = std::size_t{1} << bits;
  const std::size_t chunk = std::size_t{1} << 12;
  const std::size_t n_chunks = (n_patterns + chunk - 1) / chunk;
  const std::size_t n_tri = d * (d + 1) / 2;

  DenseOracle oracle(t);
  std::vector<detail::MomentSums> sums(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(lo + chunk, n_patterns);
    const std::size_t count = hi - lo;
    // Stage per-pattern values, then reduce pairwise inside the chunk.
    std::vector<double> ys(count * d);
    std::vector<double> xs(count);
    std::vector<std::vector<double>> probes(n_probes, std::vector<double>(d));
    for (std::size_t m = lo; m < hi; ++m) {
      for (std::size_t b = 0; b < bits; ++b)
        probes[b / d][b % d] = (m >> b) & 1u ? -1.0 : 1.0;
      const auto ps = make_probe_set(ProbeDistribution::kRademacher, probes);
      const auto y = estimate_diagonal_once(oracle, ps);
      const std::size_t row = (m - lo) * d;
      for (std::size_t i = 0; i < d; ++i) ys[row + i] = y[i];
      xs[m - lo] = trace_from_diagonal_estimate(y);
    }
    auto& s = sums[c];
    s.y.resize(d);
    s.yy.resize(n_tri);
    for (std::size_t i = 0; i < d; ++i)
      s.y[i] = pairwise_sum(count, [&](std::size_t k) { return ys[k * d + i]; });
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p; q < d; ++q)
        s.yy[detail::tri_index(d, p, q)] =
            pairwise_sum(count, [&](std::size_t k) { return ys[k * d + p] * ys[k * d + q]; });
    s.x = pairwise_sum(xs);
    s.xx = pairwise_sum(count, [&](std::size_t k) { return xs[k] * xs[k]; });
  });

  const double inv = 1.0 / static_cast<double>(n_patterns);
  EnumeratedMoments out;
  out.diag_mean.resize(d);
  out.diag_var.resize(d);
  out.diag_cov.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    out.diag_mean[i] = inv * pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].y[i]; });
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p; q < d; ++q) {
      const double eyy = inv * pairwise_sum(n_chunks, [&](std::size_t c) {
                           return sums[c].yy[detail::tri_index(d, p, q)];
                         });
      const double cov = eyy - out.diag_mean[p] * out.diag_mean[q];
      out.diag_cov[p][q] = cov;
      out.diag_cov[q][p] = cov;
      if (p == q) out.diag_var[p] = cov;
    }
  out.trace_mean = inv * pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].x; });
  const double exx = inv * pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].xx; });
  out.trace_var = exx - out.trace_mean * out.trace_mean;
  return out;
}

struct MonteCarloMoments {
  std::vector<double> diag_mean;
  std::vector<double> diag_var;  // unbiased (n-1 divisor)
  double trace_mean = 0.0;
  double trace_var = 0.0;
  std::size_t samples = 0;
};

// Sampled estimator moments. Sample k draws its probes from
// derive_run_seed(seed, 0, k); accumulation is shifted by sample 0 and
// reduced over fixed chunks, so results match for every thread count.
inline MonteCarloMoments monte_carlo_moments(const TensorOracle& oracle, ProbeDistribution dist,
                                             std::size_t n_samples, std::uint64_t seed,
                                             unsigned threads = 1) {
  if (n_samples < 2)
    throw std::invalid_argument("monte_carlo_moments: need at least two samples");
  const std::size_t d = static_cast<std::size_t>(oracle.dim());
  const int n_probes = oracle.order() - 1;

  const auto sample_at = [&](std::size_t k) {
    const auto ps = sample_probe_set(dist, oracle.dim(), n_probes, derive_run_seed(seed, 0, k));
    return estimate_both_once(oracle, ps);
  };
  const auto shift = sample_at(0);

  struct ChunkSums {
    std::vector<double> dy, dyy;
    double dx = 0.0, dxx = 0.0;
  };
  const std::size_t chunk = 1024;
  const std::size_t n_chunks = (n_samples + chunk - 1) / chunk;
  std::vector<ChunkSums> sums(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(lo + chunk, n_samples);
    const std::size_t count = hi - lo;
    std::vector<double> dys(count * d), dxs(count);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto est = sample_at(k);
      const std::size_t row = (k - lo) * d;
      for (std::size_t i = 0; i < d; ++i) dys[row + i] = est.diagonal[i] - shift.diagonal[i];
      dxs[k - lo] = est.trace - shift.trace;
    }
    auto& s = sums[c];
    s.dy.resize(d);
    s.dyy.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      s.dy[i] = pairwise_sum(count, [&](std::size_t k) { return dys[k * d + i]; });
      s.dyy[i] = pairwise_sum(count, [&](std::size_t k) {
        const double v = dys[k * d + i];
        return v * v;
      });
    }
    s.dx = pairwise_sum(dxs);
    s.dxx = pairwise_sum(count, [&](std::size_t k) { return dxs[k] * dxs[k]; });
  });

  const double n = static_cast<double>(n_samples);
  MonteCarloMoments out;
  out.samples = n_samples;
  out.diag_mean.resize(d);
  out.diag_var.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double s1 = pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].dy[i]; });
    const double s2 = pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].dyy[i]; });
    out.diag_mean[i] = shift.diagonal[i] + s1 / n;
    out.diag_var[i] = (s2 - s1 * s1 / n) / (n - 1.0);
  }
  const double s1 = pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].dx; });
  const double s2 = pairwise_sum(n_chunks, [&](std::size_t c) { return sums[c].dxx; });
  out.trace_mean = shift.trace + s1 / n;
  out.trace_var = (s2 - s1 * s1 / n) / (n - 1.0);
  return out;
}

}  // namespace tensorprobe
