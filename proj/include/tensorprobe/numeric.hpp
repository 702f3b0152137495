#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tensorprobe {

namespace detail {

template <typename F>
double pairwise_sum_range(F& f, std::size_t lo, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += f(lo + k);
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum_range(f, lo, h) + pairwise_sum_range(f, lo + h, n - h);
}

}  // namespace detail

// Pairwise (tree) reduction over f(0), ..., f(n-1). Fixed association order,
// so results are identical regardless of caller-side threading.
template <typename F>
double pairwise_sum(std::size_t n, F&& f) {
  return detail::pairwise_sum_range(f, 0, n);
}

inline double pairwise_sum(std::span<const double> v) {
  return pairwise_sum(v.size(), [&](std::size_t k) { return v[k]; });
}

inline double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pairwise_dot: length mismatch");
  return pairwise_sum(a.size(), [&](std::size_t k) { return a[k] * b[k]; });
}

// sum_k a[k*stride] * w[k], pairwise. The strided operand is the larger
// buffer; consecutive calls with adjacent base pointers reuse its cache lines.
inline double pairwise_dot_strided(const double* a, std::size_t stride, const double* w,
                                   std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k * stride] * w[k];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_dot_strided(a, stride, w, h) +
         pairwise_dot_strided(a + h * stride, stride, w + h, n - h);
}

// Elementwise product of a nonempty list of equal-length vectors.
inline std::vector<double> hadamard(std::span<const std::vector<double>> vs) {
  if (vs.empty()) throw std::invalid_argument("hadamard: empty vector list");
  std::vector<double> out = vs[0];
  for (std::size_t t = 1; t < vs.size(); ++t) {
    if (vs[t].size() != out.size()) throw std::invalid_argument("hadamard: length mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vs[t][i];
  }
  return out;
}

inline std::vector<double> hadamard(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("hadamard: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// Linear-interpolation quantile of an ascending-sorted sample, p in [0,1].
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile_sorted: p outside [0,1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median_sorted(std::span<const double> sorted) {
  return quantile_sorted(sorted, 0.5);
}

}  // namespace tensorprobe
