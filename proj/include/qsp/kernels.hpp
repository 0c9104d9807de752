// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qsp/common.hpp"

namespace qsp {

// Dense bitmask over [0, n); one bit per basis state.
struct Bitmask {
  std::size_t n = 0;
  std::vector<std::uint64_t> words;

  explicit Bitmask(std::size_t size = 0) : n(size), words((size + 63) / 64, 0) {}

  bool test(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1ULL; }
  void set(std::size_t i) { words[i >> 6] |= 1ULL << (i & 63); }
  std::size_t count() const;
};

// All reductions are compensated (Neumaier) and, under ExecPolicy::Parallel,
// accumulate per-thread partials over fixed contiguous blocks combined in
// thread order, so results are deterministic for a given thread count.
namespace kernels {

double sum_sq(std::span<const cplx> a, ExecPolicy policy);

// sum over x < prefix of |a(x)|^2
double prefix_sum_sq(std::span<const cplx> a, std::size_t prefix, ExecPolicy policy);

cplx sum(std::span<const cplx> a, ExecPolicy policy);

// sum over x of conj(a(x)) * b(x)
cplx inner(std::span<const cplx> a, std::span<const cplx> b, ExecPolicy policy);

// sum over x of (mask(x) ? -a(x) : a(x)); the post-oracle sum used by the
// inversion about the mean
cplx signed_sum(std::span<const cplx> a, const Bitmask& mask, ExecPolicy policy);

// a(x) <- two_mean + a(x) on masked entries, two_mean - a(x) elsewhere;
// equal inputs map to bitwise-equal outputs, preserving level flatness
void grover_write(std::span<cplx> a, const Bitmask& mask, cplx two_mean, ExecPolicy policy);

void scale(std::span<cplx> a, double factor, ExecPolicy policy);

// max over x of |a(x) - b(x)|
double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b, ExecPolicy policy);

}  // namespace kernels
}  // namespace qsp
