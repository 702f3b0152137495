#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tensorprobe/cp_tensor.hpp"
#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/numeric.hpp"

namespace tensorprobe {

// Matrix-free access to an order-N tensor: the only operation is contracting
// the first N-1 modes against probe vectors, returning the length-d vector
//   v[i] = sum over (j_1..j_{N-1}) of a(j_1,...,j_{N-1},i) * prod_t g_t[j_t].
// Every successful call counts as one query.
class TensorOracle {
 public:
  virtual ~TensorOracle() = default;

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

  std::vector<double> contract_all_but_last(std::span<const std::vector<double>> probes) const {
    if (static_cast<int>(probes.size()) != order_ - 1)
      throw std::invalid_argument("contract_all_but_last: expected order-1 probe vectors");
    for (const auto& g : probes)
      if (static_cast<int>(g.size()) != dim_)
        throw std::invalid_argument("contract_all_but_last: probe length must equal dim");
    queries_.fetch_add(1, std::memory_order_relaxed);
    return contract_impl(probes);
  }

 protected:
  TensorOracle(int order, int dim) : order_(order), dim_(dim) {
    if (order_ < 2) throw std::invalid_argument("TensorOracle: order must be at least 2");
    if (dim_ < 1) throw std::invalid_argument("TensorOracle: dim must be at least 1");
  }

 private:
  virtual std::vector<double> contract_impl(std::span<const std::vector<double>> probes) const = 0;

  int order_;
  int dim_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

// Contracts a dense tensor by peeling one leading mode at a time. Each output
// element is a pairwise reduction over the contracted index, so the result
// does not depend on evaluation order elsewhere.
class DenseOracle final : public TensorOracle {
 public:
  explicit DenseOracle(const DenseTensor& t) : TensorOracle(t.order(), t.dim()), tensor_(&t) {}

 private:
  std::vector<double> contract_impl(std::span<const std::vector<double>> probes) const override {
    const std::size_t d = static_cast<std::size_t>(dim());
    std::span<const double> src = tensor_->data();
    std::size_t block = src.size() / d;
    std::vector<double> buf;
    for (int t = 0; t < order() - 1; ++t) {
      const double* g = probes[static_cast<std::size_t>(t)].data();
      std::vector<double> next(block);
      for (std::size_t j = 0; j < block; ++j)
        next[j] = pairwise_dot_strided(src.data() + j, block, g, d);
      buf = std::move(next);
      src = buf;
      block /= d;
    }
    return buf;
  }

  const DenseTensor* tensor_;
};

// CP contraction in O(rank * order * dim):
//   v = sum_r w_r * (prod_t <factor(t,r), g_t>) * factor(N-1, r).
class CpOracle final : public TensorOracle {
 public:
  explicit CpOracle(const CpTensor& t) : TensorOracle(t.order(), t.dim()), tensor_(&t) {}

 private:
  std::vector<double> contract_impl(std::span<const std::vector<double>> probes) const override {
    const std::size_t d = static_cast<std::size_t>(dim());
    const std::size_t rank = static_cast<std::size_t>(tensor_->rank());
    std::vector<double> coef(rank);
    for (std::size_t r = 0; r < rank; ++r) {
      double c = tensor_->weights()[r];
      for (int t = 0; t < order() - 1; ++t)
        c *= pairwise_dot(tensor_->factor(t, static_cast<int>(r)),
                          probes[static_cast<std::size_t>(t)]);
      coef[r] = c;
    }
    const double* last = tensor_->mode_block(order() - 1).data();
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i)
      out[i] = pairwise_dot_strided(last + i, d, coef.data(), rank);
    return out;
  }

  const CpTensor* tensor_;
};

// Exact diagonal via basis probes: entry i of the contraction against
// (e_i, ..., e_i) is a(i,...,i). Costs exactly dim queries.
inline std::vector<double> exact_diagonal(const TensorOracle& oracle) {
  const int d = oracle.dim();
  std::vector<double> diag(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> basis(
      static_cast<std::size_t>(oracle.order() - 1),
      std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i) {
    for (auto& e : basis) {
      if (i > 0) e[static_cast<std::size_t>(i - 1)] = 0.0;
      e[static_cast<std::size_t>(i)] = 1.0;
    }
    diag[static_cast<std::size_t>(i)] = oracle.contract_all_but_last(basis)[static_cast<std::size_t>(i)];
  }
  return diag;
}

inline double exact_trace(const TensorOracle& oracle) {
  const auto diag = exact_diagonal(oracle);
  return pairwise_sum(diag);
}

}  // namespace tensorprobe
