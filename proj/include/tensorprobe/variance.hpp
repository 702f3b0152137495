#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/estimators.hpp"
#include "tensorprobe/probes.hpp"
#include "tensorprobe/sample_size.hpp"

namespace tensorprobe {

namespace detail {

// Digits of m in base d are the slice tuple (j_1..j_{N-1}); returns how many
// equal i.
inline int tuple_matches(std::size_t m, int dim, int n_digits, int i) {
  int s = 0;
  for (int t = 0; t < n_digits; ++t) {
    if (static_cast<int>(m % static_cast<std::size_t>(dim)) == i) ++s;
    m /= static_cast<std::size_t>(dim);
  }
  return s;
}

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int t = 0; t < k; ++t) c = c * static_cast<double>(n - t) / static_cast<double>(t + 1);
  return c;
}

}  // namespace detail

// Exact one-sample variance of the diagonal estimate at index i, for probe
// entries with fourth moment m4:
//   sum over slice tuples j of m4^(matches(j,i)) * a(j,i)^2  -  a(i..i)^2.
// Entries of the slice ending at i sit at flat positions m*d + i.
inline double diag_variance_exact(const DenseTensor& t, int i, double m4) {
  const int d = t.dim();
  if (i < 0 || i >= d) throw std::out_of_range("diag_variance_exact: index out of range");
  const int nd = t.order() - 1;
  const std::size_t slice = t.size() / static_cast<std::size_t>(d);
  const auto data = t.data();
  std::vector<double> m4_pow(static_cast<std::size_t>(t.order()), 1.0);
  for (std::size_t s = 1; s < m4_pow.size(); ++s) m4_pow[s] = m4_pow[s - 1] * m4;
  const double total = pairwise_sum(slice, [&](std::size_t m) {
    const double a = data[m * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    return m4_pow[static_cast<std::size_t>(detail::tuple_matches(m, d, nd, i))] * a * a;
  });
  const double aii = t.diag_entry(i);
  return total - aii * aii;
}

// Same value assembled the other way: bucket the squared slice entries by
// match count first, then combine with the m4 powers. Cross-check path.
inline double diag_variance_exact_grouped(const DenseTensor& t, int i, double m4) {
  const int d = t.dim();
  if (i < 0 || i >= d) throw std::out_of_range("diag_variance_exact_grouped: index out of range");
  const int nd = t.order() - 1;
  const std::size_t slice = t.size() / static_cast<std::size_t>(d);
  const auto data = t.data();
  std::vector<double> bucket(static_cast<std::size_t>(t.order()), 0.0);
  for (std::size_t m = 0; m < slice; ++m) {
    const double a = data[m * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    bucket[static_cast<std::size_t>(detail::tuple_matches(m, d, nd, i))] += a * a;
  }
  double total = 0.0;
  double pw = 1.0;
  for (std::size_t s = 0; s < bucket.size(); ++s, pw *= m4) total += pw * bucket[s];
  const double aii = t.diag_entry(i);
  return total - aii * aii;
}

// Exact one-sample covariance of diagonal estimates at p != q. Only tuples
// confined to {p,q} with complementary partners survive; there are 2^(N-1).
// Distribution-free for unit-variance symmetric probe laws.
inline double diag_covariance_exact(const DenseTensor& t, int p, int q) {
  const int d = t.dim();
  if (p < 0 || p >= d || q < 0 || q >= d)
    throw std::out_of_range("diag_covariance_exact: index out of range");
  if (p == q) throw std::invalid_argument("diag_covariance_exact: indices must differ");
  const int nd = t.order() - 1;
  const auto data = t.data();
  const std::size_t n_masks = std::size_t{1} << nd;
  const double cross = pairwise_sum(n_masks, [&](std::size_t mask) {
    std::size_t mj = 0, mk = 0;
    for (int bit = nd - 1; bit >= 0; --bit) {
      const bool take_q = (mask >> bit) & 1u;
      mj = mj * static_cast<std::size_t>(d) + static_cast<std::size_t>(take_q ? q : p);
      mk = mk * static_cast<std::size_t>(d) + static_cast<std::size_t>(take_q ? p : q);
    }
    return data[mj * static_cast<std::size_t>(d) + static_cast<std::size_t>(p)] *
           data[mk * static_cast<std::size_t>(d) + static_cast<std::size_t>(q)];
  });
  return cross - t.diag_entry(p) * t.diag_entry(q);
}

// Exact one-sample trace-estimate variance: sum of the diagonal variances
// plus twice the pairwise covariances.
inline double trace_variance_exact(const DenseTensor& t, double m4) {
  const int d = t.dim();
  const double var_sum = pairwise_sum(static_cast<std::size_t>(d), [&](std::size_t p) {
    return diag_variance_exact(t, static_cast<int>(p), m4);
  });
  double cov_sum = 0.0;
  for (int p = 1; p < d; ++p)
    for (int q = 0; q < p; ++q) cov_sum += diag_covariance_exact(t, p, q);
  return var_sum + 2.0 * cov_sum;
}

inline double slice_sumsq(const DenseTensor& t, int i) {
  const int d = t.dim();
  if (i < 0 || i >= d) throw std::out_of_range("slice_sumsq: index out of range");
  const std::size_t slice = t.size() / static_cast<std::size_t>(d);
  const auto data = t.data();
  return pairwise_sum(slice, [&](std::size_t m) {
    const double a = data[m * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    return a * a;
  });
}

// Gaussian-probe upper bound on the diagonal variance at i:
//   (3^(N-1) - 1) a_ii^2 + 3^(N-2) * (slice mass excluding the diagonal entry).
inline double diag_variance_upper_gaussian(const DenseTensor& t, int i) {
  const int n = t.order();
  const double aii_sq = t.diag_entry(i) * t.diag_entry(i);
  return (std::pow(3.0, n - 1) - 1.0) * aii_sq +
         std::pow(3.0, n - 2) * (slice_sumsq(t, i) - aii_sq);
}

inline double trace_variance_upper_rademacher(const DenseTensor& t) {
  return 2.0 * (frobenius_sq(t) - diag_sumsq(t));
}

inline double trace_variance_upper_gaussian(const DenseTensor& t) {
  return (std::pow(3.0, t.order() - 1) - 1.0) * frobenius_sq(t);
}

// Gaussian-probe variance estimate when every off-diagonal slice entry has
// common magnitude a_tilde:
//   (3^(N-1)-1) a_ii^2 + sum_{s=0}^{N-2} 3^s C(N-1,s) (d-1)^(N-1-s) a_tilde.
// Note the closed form scales with a_tilde linearly, not squared; callers
// wanting a squared off-diagonal scale should pass a_tilde*a_tilde.
inline double diag_variance_approx_equal_offdiag(const DenseTensor& t, int i, double a_tilde) {
  const int n = t.order();
  const int d = t.dim();
  if (i < 0 || i >= d)
    throw std::out_of_range("diag_variance_approx_equal_offdiag: index out of range");
  const double aii_sq = t.diag_entry(i) * t.diag_entry(i);
  double tail = 0.0;
  for (int s = 0; s <= n - 2; ++s)
    tail += std::pow(3.0, s) * detail::binomial(n - 1, s) * std::pow(d - 1, n - 1 - s);
  return (std::pow(3.0, n - 1) - 1.0) * aii_sq + tail * a_tilde;
}

// Exact-to-bound variance ratio of the Rademacher trace estimator on the
// all-ones tensor:
//   (d^N - d^2 + d(d-1) 2^(N-1)) / (2 (d^N - d)).
// Equals 1 at N = 2 and decreases in d for fixed N >= 3.
inline double tightness_ratio_all_ones(int order, int dim) {
  if (order < 2) throw std::invalid_argument("tightness_ratio_all_ones: order must be at least 2");
  if (dim < 2) throw std::invalid_argument("tightness_ratio_all_ones: dim must be at least 2");
  const double dn = std::pow(static_cast<double>(dim), order);
  const double d = static_cast<double>(dim);
  return (dn - d * d + d * (d - 1.0) * std::pow(2.0, order - 1)) / (2.0 * (dn - d));
}

inline TensorStats compute_tensor_stats(const DenseTensor& t, std::optional<int> diag_index = {}) {
  TensorStats s;
  s.order = t.order();
  s.frobenius_sq = frobenius_sq(t);
  s.diag_sumsq = diag_sumsq(t);
  s.trace = trace(t);
  if (diag_index) {
    s.slice_sumsq = slice_sumsq(t, *diag_index);
    s.diag_entry = t.diag_entry(*diag_index);
  }
  return s;
}

struct VarianceReport {
  EstimateKind target;
  ProbeDistribution distribution;
  double exact = 0.0;
  std::optional<double> upper;
  std::optional<double> ratio;  // upper / exact
};

// Exact variance and, where one exists, the matching upper bound. The
// Rademacher diagonal case has no separate bound: the formula is exact.
inline VarianceReport make_variance_report(const DenseTensor& t, EstimateKind target,
                                           std::optional<int> index, ProbeDistribution dist) {
  VarianceReport rep;
  rep.target = target;
  rep.distribution = dist;
  const double m4 = fourth_moment(dist);
  if (target == EstimateKind::kDiagonal) {
    if (!index) throw std::invalid_argument("make_variance_report: diagonal target needs an index");
    rep.exact = diag_variance_exact(t, *index, m4);
    if (dist == ProbeDistribution::kGaussian) rep.upper = diag_variance_upper_gaussian(t, *index);
  } else {
    rep.exact = trace_variance_exact(t, m4);
    rep.upper = dist == ProbeDistribution::kRademacher ? trace_variance_upper_rademacher(t)
                                                       : trace_variance_upper_gaussian(t);
  }
  if (rep.upper && rep.exact != 0.0) rep.ratio = *rep.upper / rep.exact;
  return rep;
}

}  // namespace tensorprobe
