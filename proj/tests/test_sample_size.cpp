#include <stdexcept>

#include <gtest/gtest.h>

#include "tensorprobe/sample_size.hpp"
#include "tensorprobe/variance.hpp"

namespace tp = tensorprobe;

using EK = tp::EstimateKind;
using PD = tp::ProbeDistribution;
using AG = tp::Aggregator;

namespace {

// order, frobenius_sq, diag_sumsq, trace, slice_sumsq, diag_entry
const tp::TensorStats kStats2{2, 57.0, 9.0, 3.0, 25.0, 3.0};
const tp::TensorStats kStats3{3, 57.0, 9.0, 3.0, 25.0, 3.0};

tp::SampleSizeBound bound(EK target, PD dist, AG agg, const tp::TensorStats& s, double eps = 0.5,
                          double delta = 0.1, double r = 1.0) {
  return tp::sample_size_bound(target, dist, agg, s, eps, delta, r);
}

}  // namespace

TEST(SampleSize, FrozenValuesOrderTwo) {
  auto b = bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2);
  EXPECT_DOUBLE_EQ(b.variance_term, 48.0);
  EXPECT_EQ(b.k, 790);
  EXPECT_FALSE(b.r_groups.has_value());

  b = bound(EK::kTrace, PD::kRademacher, AG::kMedianOfMeans, kStats2);
  EXPECT_DOUBLE_EQ(b.variance_term, 96.0) << "trace/Rademacher MoM keeps the doubled bound";
  EXPECT_EQ(b.k, 3154);
  ASSERT_TRUE(b.r_groups.has_value());
  EXPECT_EQ(*b.r_groups, 19);
  EXPECT_EQ(b.k % *b.r_groups, 0);

  b = bound(EK::kTrace, PD::kGaussian, AG::kMean, kStats2);
  EXPECT_DOUBLE_EQ(b.variance_term, 114.0);  // (3^1 - 1) * 57
  EXPECT_EQ(b.k, 1876);

  b = bound(EK::kTrace, PD::kGaussian, AG::kMedianOfMeans, kStats2);
  EXPECT_EQ(b.k, 3743);
  EXPECT_EQ(*b.r_groups, 19);

  b = bound(EK::kDiagonal, PD::kRademacher, AG::kMean, kStats2);
  EXPECT_DOUBLE_EQ(b.variance_term, 16.0);  // slice mass minus the diagonal entry
  EXPECT_EQ(b.k, 264);

  b = bound(EK::kDiagonal, PD::kRademacher, AG::kMedianOfMeans, kStats2);
  EXPECT_EQ(b.k, 532);

  b = bound(EK::kDiagonal, PD::kGaussian, AG::kMean, kStats2);
  EXPECT_DOUBLE_EQ(b.variance_term, 34.0);  // 2*9 + 1*(25-9)
  EXPECT_EQ(b.k, 560);

  b = bound(EK::kDiagonal, PD::kGaussian, AG::kMedianOfMeans, kStats2);
  EXPECT_EQ(b.k, 1121);
}

TEST(SampleSize, FrozenValuesOrderThree) {
  EXPECT_EQ(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats3).k, 14622);

  auto b = bound(EK::kTrace, PD::kGaussian, AG::kMean, kStats3);
  EXPECT_DOUBLE_EQ(b.variance_term, 456.0);  // (3^2 - 1) * 57
  EXPECT_EQ(b.k, 138909);

  b = bound(EK::kDiagonal, PD::kGaussian, AG::kMean, kStats3);
  EXPECT_DOUBLE_EQ(b.variance_term, 120.0);  // 8*9 + 3*(25-9)
  EXPECT_EQ(b.k, 36555);

  // The MoM route has no (2+ln(1/delta))^(2(N-1)) factor, so the count stays
  // near the order-2 scale.
  b = bound(EK::kDiagonal, PD::kGaussian, AG::kMedianOfMeans, kStats3);
  EXPECT_EQ(b.k, 3933);
  EXPECT_EQ(*b.r_groups, 19);
}

TEST(SampleSize, HypercontractivityConstantScalesMeanRoute) {
  EXPECT_EQ(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.1, 8.0).k, 6319);
}

TEST(SampleSize, Monotonicity) {
  EXPECT_EQ(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.01).k, 1862);
  EXPECT_EQ(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.25, 0.1).k, 3160);
  const auto loose = bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.2);
  const auto tight = bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.05);
  EXPECT_LT(loose.k, tight.k);
  EXPECT_LE(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2).k,
            bound(EK::kTrace, PD::kGaussian, AG::kMean, kStats2).k);
  EXPECT_LE(bound(EK::kDiagonal, PD::kRademacher, AG::kMean, kStats2).k,
            bound(EK::kDiagonal, PD::kGaussian, AG::kMean, kStats2).k);
}

TEST(SampleSize, ZeroVarianceMassClampsToMinimum) {
  const tp::TensorStats flat{2, 9.0, 9.0, 3.0, 9.0, 3.0};
  const auto mean = bound(EK::kTrace, PD::kRademacher, AG::kMean, flat);
  EXPECT_DOUBLE_EQ(mean.variance_term, 0.0);
  EXPECT_EQ(mean.k, 1);
  const auto mom = bound(EK::kTrace, PD::kRademacher, AG::kMedianOfMeans, flat);
  EXPECT_EQ(mom.k, 19) << "minimum count still fills every group";
  EXPECT_EQ(*mom.r_groups, 19);
}

TEST(SampleSize, ZeroTargetHasNoRelativeGuarantee) {
  const tp::TensorStats zero_trace{2, 57.0, 9.0, 0.0, 25.0, 3.0};
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, zero_trace), std::domain_error);
  const tp::TensorStats zero_diag{2, 57.0, 9.0, 3.0, 25.0, 0.0};
  EXPECT_THROW(bound(EK::kDiagonal, PD::kRademacher, AG::kMean, zero_diag), std::domain_error);
}

TEST(SampleSize, ParameterValidation) {
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.0), std::invalid_argument);
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, -0.1), std::invalid_argument);
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, kStats2, 0.5, 0.1, 0.0),
               std::invalid_argument);
  tp::TensorStats bad = kStats2;
  bad.order = 1;
  EXPECT_THROW(bound(EK::kTrace, PD::kRademacher, AG::kMean, bad), std::invalid_argument);
}

TEST(SampleSize, AggregatorNames) {
  EXPECT_STREQ(tp::to_string(AG::kMean), "mean");
  EXPECT_STREQ(tp::to_string(AG::kMedianOfMeans), "mom");
  EXPECT_EQ(tp::parse_aggregator("mean"), AG::kMean);
  EXPECT_EQ(tp::parse_aggregator("mom"), AG::kMedianOfMeans);
  EXPECT_EQ(tp::parse_aggregator("median-of-means"), AG::kMedianOfMeans);
  EXPECT_THROW(tp::parse_aggregator("midmean"), std::invalid_argument);
}

// End to end: stats computed from a real tensor feed the calculator.
TEST(SampleSize, WorksFromComputedTensorStats) {
  // d = 3 matrix with trace 3, diagonal mass 9, off-diagonal mass 48.
  tp::DenseTensor t(2, 3);
  t.diag_entry(0) = 3.0;
  t.at({0, 1}) = 4.0;
  t.at({1, 0}) = 4.0;
  t.at({1, 2}) = 4.0;
  const auto stats = tp::compute_tensor_stats(t);
  EXPECT_DOUBLE_EQ(stats.frobenius_sq, 57.0);
  EXPECT_DOUBLE_EQ(stats.trace, 3.0);
  const auto b = bound(EK::kTrace, PD::kRademacher, AG::kMedianOfMeans, stats);
  EXPECT_EQ(b.k, 3154);
  EXPECT_EQ(*b.r_groups, 19);
}
