#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "tensorprobe/numeric.hpp"

using namespace tensorprobe;

TEST(PairwiseSum, MatchesDirectSumOnSmallInputs) {
  std::vector<double> v;
  for (int n = 0; n <= 70; ++n) {
    EXPECT_DOUBLE_EQ(pairwise_sum(v), std::accumulate(v.begin(), v.end(), 0.0));
    v.push_back(1.0 / static_cast<double>(n + 1));
  }
}

TEST(PairwiseSum, IndexedFormAgreesWithSpanForm) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 7 == 0 ? -1.0 : 1.0) * 0.1 * static_cast<double>(i);
  const double a = pairwise_sum(v);
  const double b = pairwise_sum(v.size(), [&](std::size_t k) { return v[k]; });
  EXPECT_EQ(a, b);
}

TEST(PairwiseSum, TracksLargeCancellationBetterThanNaive) {
  // 1e16 + many small values that naive left-to-right accumulation drops.
  std::vector<double> v{1e16};
  for (int i = 0; i < 4096; ++i) v.push_back(1.0);
  v.push_back(-1e16);
  EXPECT_EQ(std::accumulate(v.begin(), v.end(), 0.0), 0.0);
  // Only the ones sharing a base-case block with +-1e16 can be lost: two
  // blocks of at most 16 elements, each off by at most ulp(1e16) = 2.
  EXPECT_NEAR(pairwise_sum(v), 4096.0, 64.0);
}

TEST(PairwiseDot, StridedFormMatchesContiguous) {
  const std::size_t n = 257;
  std::vector<double> a(n * 3), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * 3] = 0.25 * static_cast<double>(i) - 7.0;
    w[i] = 1.0 / (1.0 + static_cast<double>(i));
  }
  std::vector<double> dense(n);
  for (std::size_t i = 0; i < n; ++i) dense[i] = a[i * 3];
  EXPECT_EQ(pairwise_dot_strided(a.data(), 3, w.data(), n), pairwise_dot(dense, w));
}

TEST(Hadamard, MultipliesElementwise) {
  const std::vector<std::vector<double>> vs{{1.0, 2.0, -3.0}, {4.0, 0.5, 2.0}, {1.0, -1.0, 1.0}};
  const auto h = hadamard(vs);
  EXPECT_EQ(h, (std::vector<double>{4.0, -1.0, -6.0}));
}

TEST(Hadamard, RejectsEmptyAndMismatched) {
  EXPECT_THROW(hadamard(std::span<const std::vector<double>>{}), std::invalid_argument);
  const std::vector<std::vector<double>> bad{{1.0, 2.0}, {1.0}};
  EXPECT_THROW(hadamard(std::span<const std::vector<double>>(bad)), std::invalid_argument);
}

TEST(Quantiles, LinearInterpolation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
  const std::vector<double> single{7.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(single, 0.75), 7.0);
  EXPECT_THROW(quantile_sorted(std::span<const double>{}, 0.5), std::invalid_argument);
  EXPECT_THROW(quantile_sorted(v, 1.5), std::invalid_argument);
}
