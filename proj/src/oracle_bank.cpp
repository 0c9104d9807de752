// SPDX-License-Identifier: Apache-2.0
#include "qsp/oracle_bank.hpp"

#include <algorithm>
#include <cmath>

namespace qsp {

OracleBank::OracleBank(const TargetSpec& spec, Recip epsilon, ExecPolicy policy)
    : N_(spec.N),
      inv_(epsilon.inv),
      eta_(spec.eta),
      root_eta_n_(std::sqrt(spec.eta * double(spec.N))),
      p_(spec.p) {
  if (inv_ < 2) throw ScenarioError("oracle bank needs epsilon <= 1/2");
  kx_.resize(N_);
  const std::int64_t n = std::int64_t(N_);
  const std::int64_t inv = inv_;
  const double root = root_eta_n_;
  const auto& p = p_;
#pragma omp parallel for if (policy == ExecPolicy::Parallel && n >= 4096)
  for (std::int64_t xi = 0; xi < n; ++xi) {
    const std::uint64_t x = std::uint64_t(xi);
    const double s = std::sqrt(p(x)) * root;  // sqrt(p(x) eta N) in [0, 1]
    auto acc = [s, inv](std::int64_t k) { return s >= 1.0 - double(k) / double(inv); };
    std::int64_t k = std::int64_t(std::ceil((1.0 - s) * double(inv)));
    k = std::clamp<std::int64_t>(k, 1, inv);
    while (k > 1 && acc(k - 1)) --k;
    while (!acc(k)) ++k;  // stops at inv: the last threshold is exactly 0
    kx_[std::size_t(xi)] = std::int32_t(k);
  }
  std::vector<std::uint64_t> hist(std::size_t(inv_) + 1, 0);
  for (std::int32_t k : kx_) ++hist[std::size_t(k)];
  n_.resize(std::size_t(inv_));
  std::uint64_t running = 0;
  for (std::int64_t k = 1; k <= inv_; ++k) {
    running += hist[std::size_t(k)];
    n_[std::size_t(k - 1)] = running;
  }
  if (running != N_) throw ComputeError("oracle bank lost track of its domain");
}

double OracleBank::threshold(std::int64_t k) const {
  return (1.0 - double(k) / double(inv_)) / root_eta_n_;
}

double OracleBank::sqrt_p(std::uint64_t x) const { return std::sqrt(p_(x)); }

std::int64_t OracleBank::first_selected(std::uint64_t x,
                                        std::span<const std::int64_t> f) const {
  // acceptance is monotone, so the first selected accepter is the first
  // f_j >= first_accept(x); returns T+1 when there is none
  const std::int64_t k = kx_[x];
  const auto it = std::lower_bound(f.begin(), f.end(), k);
  return (it - f.begin()) + 1;
}

double OracleBank::sqrt_p_dprime(std::uint64_t x, std::span<const std::int64_t> f) const {
  const std::int64_t j = first_selected(x, f);
  return j <= std::int64_t(f.size()) ? threshold(f[std::size_t(j - 1)]) : 0.0;
}

bool OracleBank::is_exception(std::uint64_t x, std::span<const std::int64_t> f) const {
  const std::int64_t j = first_selected(x, f);
  const std::int64_t fj = j <= std::int64_t(f.size()) ? f[std::size_t(j - 1)] : inv_;
  return kx_[x] != fj;
}

OraclePredicate OracleBank::predicate(std::int64_t k, int L) const {
  if (L < 0 || (1ULL << L) < N_) {
    throw ComputeError("joint register is smaller than the oracle domain");
  }
  if (k < 1 || k > inv_) throw ComputeError("oracle index out of range");
  return OraclePredicate::from_predicate(
      1ULL << L, [this, k](std::uint64_t x) { return x < N_ && accepts(k, x); });
}

ExceptionReport scan_exceptions(const OracleBank& bank, std::span<const std::int64_t> f) {
  ExceptionReport rep;
  const std::int64_t T = std::int64_t(f.size());
  double mass = 0.0, comp = 0.0;  // Neumaier
  for (std::uint64_t x = 0; x < bank.domain(); ++x) {
    if (!bank.is_exception(x, f)) continue;
    ++rep.count;
    const std::int64_t j = bank.first_selected(x, f);
    if (j == 1) {
      ++rep.before_first;
    } else if (j <= T) {
      ++rep.interior;
    } else {
      ++rep.tail;
    }
    const double v = bank.p(x);
    const double t = mass + v;
    comp += std::abs(mass) >= std::abs(v) ? (mass - t) + v : (v - t) + mass;
    mass = t;
    if (rep.sample.size() < 64) rep.sample.push_back(x);
  }
  rep.probability_mass = mass + comp;
  return rep;
}

double exception_fraction_bound(Recip epsilon, double eta_c, double eta_g) {
  return 4.0 * eta_c * double(epsilon.inv) + eta_g + eta_c;
}

}  // namespace qsp
