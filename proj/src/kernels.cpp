// SPDX-License-Identifier: Apache-2.0
#include "qsp/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsp {

std::size_t Bitmask::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

namespace kernels {
namespace {

// Neumaier-compensated accumulator.
struct Acc {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  void add(const Acc& o) {
    add(o.s);
    add(o.c);
  }
  double get() const { return s + c; }
};

struct Acc2 {
  Acc re, im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void add(const Acc2& o) {
    re.add(o.re);
    im.add(o.im);
  }
  cplx get() const { return {re.get(), im.get()}; }
};

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(tid, lo, hi) over a fixed contiguous partition of [0, n).
template <class Body>
void parallel_blocks(std::size_t n, int nt, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
  {
    int tid = omp_get_thread_num();
    std::size_t lo = n * static_cast<std::size_t>(tid) / static_cast<std::size_t>(nt);
    std::size_t hi = n * (static_cast<std::size_t>(tid) + 1) / static_cast<std::size_t>(nt);
    body(tid, lo, hi);
  }
#else
  for (int tid = 0; tid < nt; ++tid) {
    std::size_t lo = n * static_cast<std::size_t>(tid) / static_cast<std::size_t>(nt);
    std::size_t hi = n * (static_cast<std::size_t>(tid) + 1) / static_cast<std::size_t>(nt);
    body(tid, lo, hi);
  }
#endif
}

// Reductions sum fixed 65536-element blocks independently and combine them
// in block order, so every policy and thread count produces one canonical
// bit pattern.
template <class AccT, class PerIndex>
AccT reduce(std::size_t n, ExecPolicy policy, PerIndex&& term) {
  constexpr std::size_t kBlock = std::size_t{1} << 16;
  auto run = [&](std::size_t lo, std::size_t hi) {
    AccT local;
    for (std::size_t i = lo; i < hi; ++i) term(local, i);
    return local;
  };
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  if (nb <= 1) return run(0, n);
  std::vector<AccT> parts(nb);
  if (policy == ExecPolicy::Serial) {
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t lo = b * kBlock;
      parts[b] = run(lo, std::min(n, lo + kBlock));
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      parts[static_cast<std::size_t>(b)] = run(lo, std::min(n, lo + kBlock));
    }
  }
  AccT acc;
  for (const AccT& p : parts) acc.add(p);  // fixed combine order
  return acc;
}

}  // namespace

double sum_sq(std::span<const cplx> a, ExecPolicy policy) {
  return reduce<Acc>(a.size(), policy, [&](Acc& acc, std::size_t i) {
           acc.add(a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
         })
      .get();
}

double prefix_sum_sq(std::span<const cplx> a, std::size_t prefix, ExecPolicy policy) {
  if (prefix > a.size()) prefix = a.size();
  return sum_sq(a.subspan(0, prefix), policy);
}

cplx sum(std::span<const cplx> a, ExecPolicy policy) {
  return reduce<Acc2>(a.size(), policy, [&](Acc2& acc, std::size_t i) { acc.add(a[i]); }).get();
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b, ExecPolicy policy) {
  return reduce<Acc2>(a.size(), policy, [&](Acc2& acc, std::size_t i) {
           acc.add(std::conj(a[i]) * b[i]);
         })
      .get();
}

cplx signed_sum(std::span<const cplx> a, const Bitmask& mask, ExecPolicy policy) {
  return reduce<Acc2>(a.size(), policy, [&](Acc2& acc, std::size_t i) {
           acc.add(mask.test(i) ? -a[i] : a[i]);
         })
      .get();
}

void grover_write(std::span<cplx> a, const Bitmask& mask, cplx two_mean, ExecPolicy policy) {
  std::size_t n = a.size();
  auto body = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      a[i] = mask.test(i) ? two_mean + a[i] : two_mean - a[i];
  };
  if (policy == ExecPolicy::Serial || n < 4096) {
    body(0, n);
    return;
  }
  parallel_blocks(n, thread_count(),
                  [&](int, std::size_t lo, std::size_t hi) { body(lo, hi); });
}

void scale(std::span<cplx> a, double factor, ExecPolicy policy) {
  std::size_t n = a.size();
  auto body = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) a[i] *= factor;
  };
  if (policy == ExecPolicy::Serial || n < 4096) {
    body(0, n);
    return;
  }
  parallel_blocks(n, thread_count(),
                  [&](int, std::size_t lo, std::size_t hi) { body(lo, hi); });
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b, ExecPolicy policy) {
  std::size_t n = a.size();
  if (policy == ExecPolicy::Serial || n < 4096) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }
  int nt = thread_count();
  std::vector<double> parts(static_cast<std::size_t>(nt), 0.0);
  parallel_blocks(n, nt, [&](int tid, std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    parts[static_cast<std::size_t>(tid)] = m;
  });
  double m = 0.0;
  for (double p : parts) m = std::max(m, p);
  return m;
}

}  // namespace kernels
}  // namespace qsp
