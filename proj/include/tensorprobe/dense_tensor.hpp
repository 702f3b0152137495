#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensorprobe/numeric.hpp"

namespace tensorprobe {

// Checked d^order; throws when the entry count cannot be materialized.
inline std::size_t tensor_entry_count(int order, int dim) {
  if (order < 2) throw std::invalid_argument("tensor order must be at least 2");
  if (dim < 1) throw std::invalid_argument("tensor dim must be at least 1");
  const std::size_t cap = std::numeric_limits<std::size_t>::max() / sizeof(double);
  std::size_t n = 1;
  for (int t = 0; t < order; ++t) {
    if (n > cap / static_cast<std::size_t>(dim))
      throw std::invalid_argument("tensor entry count overflows: dim^order too large");
    n *= static_cast<std::size_t>(dim);
  }
  return n;
}

// Cubical order-N tensor, one flat buffer, last index fastest:
// flat(i_1,...,i_N) = ((i_1*d + i_2)*d + ...)*d + i_N.
class DenseTensor {
 public:
  DenseTensor(int order, int dim)
      : order_(order), dim_(dim), data_(tensor_entry_count(order, dim), 0.0) {}

  DenseTensor(int order, int dim, std::vector<double> data)
      : order_(order), dim_(dim), data_(std::move(data)) {
    if (data_.size() != tensor_entry_count(order, dim))
      throw std::invalid_argument("DenseTensor: data length is not dim^order");
  }

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::size_t flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != order_)
      throw std::invalid_argument("DenseTensor: index arity mismatch");
    std::size_t f = 0;
    for (int t = 0; t < order_; ++t) {
      if (idx[t] < 0 || idx[t] >= dim_)
        throw std::out_of_range("DenseTensor: index out of range");
      f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[t]);
    }
    return f;
  }

  double at(std::span<const int> idx) const { return data_[flat_index(idx)]; }
  double& at(std::span<const int> idx) { return data_[flat_index(idx)]; }
  double at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }
  double& at(std::initializer_list<int> idx) {
    return data_[flat_index(std::span<const int>(idx.begin(), idx.size()))];
  }

  // Flat position of the diagonal entry (i, i, ..., i).
  std::size_t diag_flat(int i) const {
    if (i < 0 || i >= dim_) throw std::out_of_range("DenseTensor: diagonal index out of range");
    std::size_t f = 0;
    for (int t = 0; t < order_; ++t)
      f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return f;
  }

  double diag_entry(int i) const { return data_[diag_flat(i)]; }
  double& diag_entry(int i) { return data_[diag_flat(i)]; }

 private:
  int order_;
  int dim_;
  std::vector<double> data_;
};

inline double frobenius_sq(const DenseTensor& t) {
  const auto d = t.data();
  return pairwise_sum(d.size(), [&](std::size_t k) { return d[k] * d[k]; });
}

inline double diag_sumsq(const DenseTensor& t) {
  return pairwise_sum(static_cast<std::size_t>(t.dim()), [&](std::size_t i) {
    const double v = t.diag_entry(static_cast<int>(i));
    return v * v;
  });
}

inline double trace(const DenseTensor& t) {
  return pairwise_sum(static_cast<std::size_t>(t.dim()),
                      [&](std::size_t i) { return t.diag_entry(static_cast<int>(i)); });
}

// Diagonal share of squared mass: diag_sumsq / frobenius_sq, in [0,1].
inline double alpha_ratio(const DenseTensor& t) {
  const double f = frobenius_sq(t);
  if (f == 0.0) throw std::domain_error("alpha_ratio: all-zero tensor has no defined ratio");
  return diag_sumsq(t) / f;
}

}  // namespace tensorprobe
