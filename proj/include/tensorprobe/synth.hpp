#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/rng.hpp"

namespace tensorprobe {

struct GeneratorSpec {
  int order = 0;
  int dim = 0;
  double alpha = 0.0;  // target diagonal share of squared mass, strictly in (0,1)
  std::uint64_t seed = 0;
};

// Standard-normal entries with the diagonal rescaled so that the diagonal
// share of squared mass is exactly alpha:
//   c = sqrt(alpha * S_off / ((1 - alpha) * S_diag)).
// Stream discipline: substream derive_run_seed(seed,0,0) draws the d diagonal
// entries first (redrawing exact zeros), substream derive_run_seed(seed,1,0)
// fills the off-diagonal entries in flat order. Keeping the diagonal draws in
// their own substream means tensors that differ only in order or alpha share
// raw diagonals, which keeps relative errors comparable across such families.
inline DenseTensor generate_with_alpha(const GeneratorSpec& spec) {
  if (spec.order < 2) throw std::invalid_argument("generate_with_alpha: order must be at least 2");
  if (spec.dim < 2) throw std::invalid_argument("generate_with_alpha: dim must be at least 2");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    throw std::invalid_argument("generate_with_alpha: alpha must lie strictly in (0,1)");

  DenseTensor t(spec.order, spec.dim);
  auto data = t.data();

  SplitMix64 diag_gen(derive_run_seed(spec.seed, 0, 0));
  for (int i = 0; i < spec.dim; ++i) {
    double v = diag_gen.next_gaussian();
    while (v == 0.0) v = diag_gen.next_gaussian();
    t.diag_entry(i) = v;
  }

  SplitMix64 off_gen(derive_run_seed(spec.seed, 1, 0));
  {
    std::size_t next_diag_pos = 0;
    int next_diag_i = 0;
    for (std::size_t f = 0; f < data.size(); ++f) {
      if (next_diag_i < spec.dim && f == next_diag_pos) {
        ++next_diag_i;
        next_diag_pos = next_diag_i < spec.dim
                            ? t.diag_flat(next_diag_i)
                            : data.size();
        continue;
      }
      data[f] = off_gen.next_gaussian();
    }
  }

  const double s_diag = diag_sumsq(t);
  const double s_off = frobenius_sq(t) - s_diag;
  if (s_off <= 0.0)
    throw std::domain_error("generate_with_alpha: off-diagonal mass vanished");
  const double c = std::sqrt(spec.alpha * s_off / ((1.0 - spec.alpha) * s_diag));
  for (int i = 0; i < spec.dim; ++i) t.diag_entry(i) *= c;
  return t;
}

inline DenseTensor all_ones(int order, int dim) {
  DenseTensor t(order, dim);
  for (auto& v : t.data()) v = 1.0;
  return t;
}

// Ones on the main diagonal, zero elsewhere.
inline DenseTensor identity_like(int order, int dim) {
  DenseTensor t(order, dim);
  for (int i = 0; i < dim; ++i) t.diag_entry(i) = 1.0;
  return t;
}

}  // namespace tensorprobe
