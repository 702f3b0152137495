#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tensorprobe/dense_tensor.hpp"

namespace tensorprobe {

// Rank-R sum of weighted outer products of unit-mode factor vectors:
//   entry(i_1,...,i_N) = sum_r w_r * prod_n factor(n, r)[i_n].
// Factors are stored per mode, r-major, each vector contiguous.
class CpTensor {
 public:
  CpTensor(int order, int dim, std::vector<double> weights,
           std::vector<std::vector<double>> mode_factors)
      : order_(order), dim_(dim), weights_(std::move(weights)),
        factors_(std::move(mode_factors)) {
    if (order_ < 2) throw std::invalid_argument("CpTensor: order must be at least 2");
    if (dim_ < 1) throw std::invalid_argument("CpTensor: dim must be at least 1");
    if (weights_.empty()) throw std::invalid_argument("CpTensor: rank must be at least 1");
    if (factors_.size() != static_cast<std::size_t>(order_))
      throw std::invalid_argument("CpTensor: expected one factor block per mode");
    const std::size_t expect = weights_.size() * static_cast<std::size_t>(dim_);
    for (const auto& block : factors_)
      if (block.size() != expect)
        throw std::invalid_argument("CpTensor: factor block must hold rank*dim values");
  }

  int order() const { return order_; }
  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(weights_.size()); }
  std::span<const double> weights() const { return weights_; }

  std::span<const double> factor(int mode, int r) const {
    return std::span<const double>(factors_[static_cast<std::size_t>(mode)])
        .subspan(static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_),
                 static_cast<std::size_t>(dim_));
  }

  std::span<const double> mode_block(int mode) const { return factors_[static_cast<std::size_t>(mode)]; }

  // Materializes the full entry array. Guarded because dim^order can be huge.
  DenseTensor densify(std::size_t max_entries = (std::size_t{1} << 27)) const {
    const std::size_t n = tensor_entry_count(order_, dim_);
    if (n > max_entries)
      throw std::invalid_argument("CpTensor::densify: entry count exceeds the allowed cap");
    DenseTensor out(order_, dim_);
    auto data = out.data();
    std::vector<int> idx(static_cast<std::size_t>(order_), 0);
    for (std::size_t f = 0; f < n; ++f) {
      data[f] = pairwise_sum(weights_.size(), [&](std::size_t r) {
        double term = weights_[r];
        for (int m = 0; m < order_; ++m)
          term *= factor(m, static_cast<int>(r))[static_cast<std::size_t>(idx[static_cast<std::size_t>(m)])];
        return term;
      });
      for (int m = order_ - 1; m >= 0; --m) {
        if (++idx[static_cast<std::size_t>(m)] < dim_) break;
        idx[static_cast<std::size_t>(m)] = 0;
      }
    }
    return out;
  }

 private:
  int order_;
  int dim_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> factors_;
};

}  // namespace tensorprobe
