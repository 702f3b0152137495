#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support/naive.hpp"
#include "tensorprobe/errors.hpp"
#include "tensorprobe/synth.hpp"
#include "tensorprobe/tensor_io.hpp"

namespace tp = tensorprobe;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tensorprobe_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

using TensorIo = TempDir;

}  // namespace

TEST(Synth, AlphaRatioHitsTarget) {
  for (int order : {2, 3}) {
    for (int dim : {2, 5, 8}) {
      for (double alpha : {0.1, 0.35, 0.5, 0.8}) {
        for (std::uint64_t seed : {1ull, 99ull}) {
          const auto t = tp::generate_with_alpha({order, dim, alpha, seed});
          EXPECT_NEAR(tp::alpha_ratio(t), alpha, 1e-9)
              << "order " << order << " dim " << dim << " alpha " << alpha << " seed " << seed;
        }
      }
    }
  }
}

TEST(Synth, DeterministicPerSeed) {
  const auto a = tp::generate_with_alpha({3, 6, 0.4, 7});
  const auto b = tp::generate_with_alpha({3, 6, 0.4, 7});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t f = 0; f < a.size(); ++f) ASSERT_EQ(a.data()[f], b.data()[f]);
  const auto c = tp::generate_with_alpha({3, 6, 0.4, 8});
  EXPECT_NE(std::vector<double>(a.data().begin(), a.data().end()),
            std::vector<double>(c.data().begin(), c.data().end()));
}

// Tensors drawn with the same seed share their raw entries: the off-diagonal
// part is identical across alphas, and the diagonals differ only by the
// scalar alpha factor.
TEST(Synth, SameSeedSharesRawDrawsAcrossAlphas) {
  const auto a = tp::generate_with_alpha({2, 5, 0.3, 11});
  const auto b = tp::generate_with_alpha({2, 5, 0.7, 11});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) {
        ASSERT_EQ(a.at({i, j}), b.at({i, j}));
      }
  const double ratio0 = b.diag_entry(0) / a.diag_entry(0);
  for (int i = 1; i < 5; ++i)
    EXPECT_NEAR(b.diag_entry(i) / a.diag_entry(i), ratio0, 1e-12 * std::abs(ratio0));
}

TEST(Synth, SameSeedSharesDiagonalDrawsAcrossOrders) {
  const auto a = tp::generate_with_alpha({2, 4, 0.5, 21});
  const auto b = tp::generate_with_alpha({3, 4, 0.5, 21});
  const double ratio0 = b.diag_entry(0) / a.diag_entry(0);
  for (int i = 1; i < 4; ++i)
    EXPECT_NEAR(b.diag_entry(i) / a.diag_entry(i), ratio0, 1e-12 * std::abs(ratio0));
}

TEST(Synth, RescalingOffDiagonalMovesAlphaAsPredicted) {
  auto t = tp::generate_with_alpha({2, 6, 0.5, 3});
  // alpha' = a / (a + s^2 (1 - a)) when off-diagonal entries scale by s
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) t.at({i, j}) *= 2.0;
  EXPECT_NEAR(tp::alpha_ratio(t), 0.5 / (0.5 + 4.0 * 0.5), 1e-12);
}

TEST(Synth, Validation) {
  EXPECT_THROW(tp::generate_with_alpha({1, 4, 0.5, 1}), std::invalid_argument);
  EXPECT_THROW(tp::generate_with_alpha({2, 1, 0.5, 1}), std::invalid_argument);
  EXPECT_THROW(tp::generate_with_alpha({2, 4, 0.0, 1}), std::invalid_argument);
  EXPECT_THROW(tp::generate_with_alpha({2, 4, 1.0, 1}), std::invalid_argument);
  EXPECT_THROW(tp::generate_with_alpha({2, 4, -0.2, 1}), std::invalid_argument);
}

TEST(Synth, PatternTensors) {
  const auto ones = tp::all_ones(3, 3);
  for (double v : ones.data()) ASSERT_EQ(v, 1.0);
  EXPECT_EQ(tp::trace(ones), 3.0);

  const auto id = tp::identity_like(3, 4);
  EXPECT_EQ(tp::trace(id), 4.0);
  EXPECT_EQ(tp::frobenius_sq(id), 4.0);
  EXPECT_EQ(tp::diag_sumsq(id), 4.0);
  EXPECT_EQ(tp::alpha_ratio(id), 1.0);
}

TEST_F(TensorIo, DenseRoundTripIsBitExact) {
  const auto t = testsupport::random_dense(3, 4, 2023);
  const auto file = path("t.tnsr");
  tp::write_dense_file(file, t);
  const auto back = tp::read_dense_file(file);
  EXPECT_EQ(back.order(), 3);
  EXPECT_EQ(back.dim(), 4);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t f = 0; f < t.size(); ++f) ASSERT_EQ(back.data()[f], t.data()[f]);
}

TEST_F(TensorIo, DenseRoundTripPreservesNonFinite) {
  tp::DenseTensor t(2, 2, {1.0, std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::quiet_NaN()});
  const auto file = path("nf.tnsr");
  tp::write_dense_file(file, t);
  const auto back = tp::read_dense_file(file);
  EXPECT_EQ(back.data()[1], std::numeric_limits<double>::infinity());
  EXPECT_EQ(back.data()[2], -std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(back.data()[3]));
}

TEST_F(TensorIo, CpRoundTripIsBitExact) {
  std::mt19937_64 rng(555);
  std::normal_distribution<double> normal;
  std::vector<double> weights = {1.5, -2.0, 0.25};
  std::vector<std::vector<double>> modes(3, std::vector<double>(3 * 4));
  for (auto& block : modes)
    for (auto& v : block) v = normal(rng);
  const tp::CpTensor t(3, 4, weights, modes);
  const auto file = path("t.tcpd");
  tp::write_cp_file(file, t);
  const auto back = tp::read_cp_file(file);
  EXPECT_EQ(back.order(), 3);
  EXPECT_EQ(back.dim(), 4);
  EXPECT_EQ(back.rank(), 3);
  for (int r = 0; r < 3; ++r) ASSERT_EQ(back.weights()[static_cast<std::size_t>(r)], weights[static_cast<std::size_t>(r)]);
  for (int m = 0; m < 3; ++m) {
    const auto a = back.mode_block(m);
    const auto& b = modes[static_cast<std::size_t>(m)];
    for (std::size_t f = 0; f < b.size(); ++f) ASSERT_EQ(a[f], b[f]);
  }
}

TEST_F(TensorIo, VariantReaderDispatchesOnMagic) {
  const auto dense = testsupport::random_dense(2, 3, 10);
  tp::write_dense_file(path("a.bin"), dense);
  const auto any_dense = tp::read_tensor_file(path("a.bin"));
  EXPECT_TRUE(std::holds_alternative<tp::DenseTensor>(any_dense));

  const tp::CpTensor cp(2, 2, {1.0}, {{1, 2}, {3, 4}});
  tp::write_cp_file(path("b.bin"), cp);
  const auto any_cp = tp::read_tensor_file(path("b.bin"));
  EXPECT_TRUE(std::holds_alternative<tp::CpTensor>(any_cp));
}

TEST_F(TensorIo, RejectsUnknownMagic) {
  const auto file = path("bad.bin");
  std::ofstream(file, std::ios::binary) << "NOPE!noise";
  EXPECT_THROW(tp::read_dense_file(file), tp::IoError);
  EXPECT_THROW(tp::read_tensor_file(file), tp::IoError);
}

TEST_F(TensorIo, RejectsTruncation) {
  const auto t = testsupport::random_dense(2, 4, 77);
  const auto file = path("trunc.tnsr");
  tp::write_dense_file(file, t);
  const auto full = fs::file_size(file);
  fs::resize_file(file, full - 9);
  EXPECT_THROW(tp::read_dense_file(file), tp::IoError);
}

TEST_F(TensorIo, RejectsTrailingBytes) {
  const auto t = testsupport::random_dense(2, 2, 5);
  const auto file = path("trail.tnsr");
  tp::write_dense_file(file, t);
  std::ofstream(file, std::ios::binary | std::ios::app) << "x";
  EXPECT_THROW(tp::read_dense_file(file), tp::IoError);
}

TEST_F(TensorIo, MissingFile) {
  EXPECT_THROW(tp::read_dense_file(path("absent.tnsr")), tp::IoError);
  EXPECT_THROW(tp::read_tensor_file(path("absent.tnsr")), tp::IoError);
}

TEST_F(TensorIo, ProbeFileParsesRows) {
  const auto file = path("probes.txt");
  std::ofstream(file) << "1 -1 0.5\n"
                         "\n"
                         "0 2.25 -3\n";
  const auto probes = tp::read_probe_file(file, 3, 3);
  ASSERT_EQ(probes.size(), 2u);
  EXPECT_EQ(probes[0], (std::vector<double>{1.0, -1.0, 0.5}));
  EXPECT_EQ(probes[1], (std::vector<double>{0.0, 2.25, -3.0}));
}

TEST_F(TensorIo, ProbeFileShapeGuards) {
  const auto file = path("probes.txt");
  std::ofstream(file) << "1 -1\n";
  EXPECT_THROW(tp::read_probe_file(file, 3, 2), tp::IoError);  // one probe, need two
  EXPECT_THROW(tp::read_probe_file(file, 2, 3), tp::IoError);  // wrong length
  EXPECT_THROW(tp::read_probe_file(path("nope.txt"), 2, 2), tp::IoError);
}

TEST_F(TensorIo, GeneratedFileFeedsReaderPipeline) {
  const auto t = tp::generate_with_alpha({3, 5, 0.25, 2024});
  const auto file = path("gen.tnsr");
  tp::write_dense_file(file, t);
  const auto back = tp::read_dense_file(file);
  EXPECT_NEAR(tp::alpha_ratio(back), 0.25, 1e-9);
  EXPECT_EQ(tp::trace(back), tp::trace(t));
}
