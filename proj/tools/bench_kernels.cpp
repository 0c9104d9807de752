// SPDX-License-Identifier: Apache-2.0
//
// Timing comparison of the serial reference kernels against the OpenMP
// parallel paths on dense state vectors. Results are wall-clock medians over
// repeated passes; on a single-core host the two columns should be close.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qsp/kernels.hpp"

using namespace qsp;
using clock_type = std::chrono::steady_clock;

namespace {

double median_ms(const std::vector<double>& samples_in) {
  std::vector<double> s = samples_in;
  std::sort(s.begin(), s.end());
  return s[s.size() / 2];
}

template <typename F>
double time_ms(F&& body, int reps) {
  std::vector<double> samples;
  samples.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    body();
    const auto t1 = clock_type::now();
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return median_ms(samples);
}

}  // namespace

int main() {
  const int L = 22;  // 4M amplitudes, 64 MiB
  const std::size_t n = std::size_t(1) << L;
  const int reps = 5;

  std::mt19937_64 eng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<cplx> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = {unif(eng), unif(eng)};
    b[i] = {unif(eng), unif(eng)};
  }
  Bitmask mask(n);
  for (std::size_t i = 0; i < n; i += 3) mask.set(i);

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled at compile time\n");
#endif
  std::printf("state size 2^%d amplitudes, median of %d passes\n\n", L, reps);
  std::printf("%-16s %12s %12s %9s\n", "kernel", "serial (ms)", "parallel (ms)", "speedup");

  auto row = [&](const char* name, double serial, double parallel) {
    std::printf("%-16s %12.3f %12.3f %8.2fx\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
  };

  {
    volatile double sink = 0;
    const double ts = time_ms([&] { sink = kernels::sum_sq(a, ExecPolicy::Serial); }, reps);
    const double tp = time_ms([&] { sink = kernels::sum_sq(a, ExecPolicy::Parallel); }, reps);
    (void)sink;
    row("sum_sq", ts, tp);
  }
  {
    volatile double sink = 0;
    const double ts =
        time_ms([&] { sink = kernels::prefix_sum_sq(a, n / 2, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { sink = kernels::prefix_sum_sq(a, n / 2, ExecPolicy::Parallel); }, reps);
    (void)sink;
    row("prefix_sum_sq", ts, tp);
  }
  {
    cplx sink;
    const double ts = time_ms([&] { sink = kernels::inner(a, b, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { sink = kernels::inner(a, b, ExecPolicy::Parallel); }, reps);
    (void)sink;
    row("inner", ts, tp);
  }
  {
    cplx sink;
    const double ts =
        time_ms([&] { sink = kernels::signed_sum(a, mask, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { sink = kernels::signed_sum(a, mask, ExecPolicy::Parallel); }, reps);
    (void)sink;
    row("signed_sum", ts, tp);
  }
  {
    std::vector<cplx> w = a;
    const cplx two_mean{0.25, 0.125};
    const double ts =
        time_ms([&] { kernels::grover_write(w, mask, two_mean, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { kernels::grover_write(w, mask, two_mean, ExecPolicy::Parallel); }, reps);
    row("grover_write", ts, tp);
  }
  {
    std::vector<cplx> w = a;
    const double ts =
        time_ms([&] { kernels::scale(w, 1.0000001, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { kernels::scale(w, 1.0000001, ExecPolicy::Parallel); }, reps);
    row("scale", ts, tp);
  }
  {
    volatile double sink = 0;
    const double ts =
        time_ms([&] { sink = kernels::max_abs_diff(a, b, ExecPolicy::Serial); }, reps);
    const double tp =
        time_ms([&] { sink = kernels::max_abs_diff(a, b, ExecPolicy::Parallel); }, reps);
    (void)sink;
    row("max_abs_diff", ts, tp);
  }

  // equality spot check: the two policies agree bit for bit on reductions
  const double s = kernels::sum_sq(a, ExecPolicy::Serial);
  const double p = kernels::sum_sq(a, ExecPolicy::Parallel);
  std::printf("\nsum_sq serial %.17g parallel %.17g (|diff| = %.3g)\n", s, p,
              std::fabs(s - p));
  return 0;
}
