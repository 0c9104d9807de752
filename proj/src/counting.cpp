// SPDX-License-Identifier: Apache-2.0
#include "qsp/counting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace qsp {
namespace {

constexpr double kPi = std::numbers::pi;

// distance from x to the nearest integer, in [-1/2, 1/2]
double reduce_half(double x) { return x - std::round(x); }

std::shared_ptr<const CountingDistribution> build_distribution(std::uint64_t M, std::uint64_t D,
                                                               int a_c) {
  if (a_c < 2 || a_c > 24) {
    throw ResourceError("counting register of " + std::to_string(a_c) +
                        " qubits is outside the supported range [2, 24]");
  }
  if (D < 2 || M > D) throw ComputeError("counting domain must satisfy M <= D, D >= 2");
  auto dist = std::make_shared<CountingDistribution>();
  dist->R = std::int64_t(1) << a_c;
  dist->domain = D;
  dist->solutions = M;
  const std::int64_t R = dist->R;
  dist->pmf.assign(std::size_t(R), 0.0);

  if (M == 0 || 2 * M == D || M == D) {
    // eigenphase is an exact multiple of 1/R: the register reads it exactly
    dist->f = M == 0 ? 0.0 : (2 * M == D ? 0.25 : 0.5);
    const std::int64_t b0 = std::int64_t(std::llround(dist->f * double(R)));
    dist->pmf[std::size_t(b0)] += 0.5;
    dist->pmf[std::size_t((R - b0) % R)] += 0.5;
  } else {
    dist->f = std::asin(std::sqrt(double(M) / double(D))) / kPi;
    const double f = dist->f;
    const double rf = double(R) * f;
    const double frac = rf - std::floor(rf);
    // sin^2(pi R (f -+ b/R)) is independent of the integer b
    const double numer = std::sin(kPi * frac);
    auto kernel = [&](double delta) {
      const double s = std::sin(kPi * reduce_half(delta));
      if (s == 0.0) return 1.0;  // removable singularity: the exact-hit limit
      const double q = numer / (double(R) * s);
      return q * q;
    };
    for (std::int64_t b = 0; b < R; ++b) {
      const double off = double(b) / double(R);
      dist->pmf[std::size_t(b)] = 0.5 * (kernel(f - off) + kernel(f + off));
    }
  }

  dist->cdf.resize(std::size_t(R));
  double acc = 0.0, comp = 0.0;  // Neumaier
  for (std::int64_t b = 0; b < R; ++b) {
    const double v = dist->pmf[std::size_t(b)];
    const double t = acc + v;
    comp += std::abs(acc) >= std::abs(v) ? (acc - t) + v : (v - t) + acc;
    acc = t;
    dist->cdf[std::size_t(b)] = acc + comp;
  }
  return dist;
}

std::mutex cache_mutex;
std::map<std::tuple<std::uint64_t, std::uint64_t, int>,
         std::shared_ptr<const CountingDistribution>>
    cache;

}  // namespace

std::shared_ptr<const CountingDistribution> counting_distribution(std::uint64_t M,
                                                                  std::uint64_t D, int a_c) {
  const auto key = std::make_tuple(M, D, a_c);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto dist = build_distribution(M, D, a_c);
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (cache.size() >= 64) cache.clear();  // crude cap; entries are cheap to rebuild
  cache.emplace(key, dist);
  return dist;
}

double decode_count(std::int64_t b, std::int64_t R, std::uint64_t D) {
  const double s = std::sin(kPi * double(b) / double(R));
  return double(D) * s * s;
}

std::int64_t sample_outcome(const CountingDistribution& dist, double u) {
  const double total = dist.cdf.back();
  const double t = u * total;
  const auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), t);
  return std::min<std::int64_t>(it - dist.cdf.begin(), dist.R - 1);
}

double in_contract_mass(const CountingDistribution& dist, double tol) {
  double acc = 0.0;
  for (std::int64_t b = 0; b < dist.R; ++b) {
    const double est = decode_count(b, dist.R, dist.domain);
    if (std::abs(est - double(dist.solutions)) < tol) acc += dist.pmf[std::size_t(b)];
  }
  return acc;
}

std::uint64_t counting_calls_per_estimate(int a_c) { return (std::uint64_t(1) << a_c) - 1; }

std::vector<CountEstimate> estimate_all(const OracleBank& bank, const AccuracyParams& params,
                                        Rng& rng, ExecContext& ctx) {
  const auto& counts = bank.counts();
  std::vector<CountEstimate> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    CountEstimate& e = out[i];
    e.true_count = counts[i];
    if (params.counting_mode == CountingMode::Exact) {
      e.estimate = double(counts[i]);
      e.outcome = -1;
      e.exact = true;
    } else {
      const std::uint64_t D = 2 * bank.domain();
      const auto dist = counting_distribution(counts[i], D, params.a_c);
      e.outcome = sample_outcome(*dist, rng.uniform());
      e.estimate = decode_count(e.outcome, dist->R, D);
      e.exact = false;
      ctx.counting_oracle_calls += counting_calls_per_estimate(params.a_c);
    }
  }
  return out;
}

}  // namespace qsp
