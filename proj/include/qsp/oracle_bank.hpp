// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qsp/common.hpp"
#include "qsp/scenario.hpp"
#include "qsp/state.hpp"

namespace qsp {

// Bank of 1/eps nested threshold oracles over [0, N). Oracle k accepts x when
// sqrt(p(x)) >= (1 - eps k)/sqrt(eta N); acceptance is monotone in k and
// oracle 1/eps accepts every x < N. All downstream classification is done on
// the integer index of the first accepting oracle, never on float equality.
class OracleBank {
 public:
  OracleBank(const TargetSpec& spec, Recip epsilon, ExecPolicy policy = ExecPolicy::Parallel);

  std::int64_t inv_eps() const { return inv_; }
  std::uint64_t domain() const { return N_; }
  double eta() const { return eta_; }

  // (1 - k/inv_eps)/sqrt(eta N) for k in [0, inv_eps]; exactly 0 at k = inv_eps
  double threshold(std::int64_t k) const;

  // smallest k whose oracle accepts x (in [1, inv_eps])
  std::int64_t first_accept(std::uint64_t x) const { return kx_[x]; }
  bool accepts(std::int64_t k, std::uint64_t x) const { return k >= kx_[x]; }

  // counts()[k-1] = number of x < N accepted by oracle k; non-decreasing,
  // ends at N
  const std::vector<std::uint64_t>& counts() const { return n_; }

  double p(std::uint64_t x) const { return p_(x); }
  double sqrt_p(std::uint64_t x) const;

  // Staircase floors of sqrt(p). The full-bank staircase uses every oracle;
  // the selected staircase only the subset f (ascending, values in
  // [1, inv_eps)), with a sentinel f_{T+1} = inv_eps for states no selected
  // oracle accepts.
  double sqrt_p_prime(std::uint64_t x) const { return threshold(kx_[x]); }
  std::int64_t first_selected(std::uint64_t x, std::span<const std::int64_t> f) const;
  double sqrt_p_dprime(std::uint64_t x, std::span<const std::int64_t> f) const;

  // The two staircases disagree at x iff the first accepting oracle was not
  // selected (integer comparison of bank indices).
  bool is_exception(std::uint64_t x, std::span<const std::int64_t> f) const;

  // Oracle k lifted to the joint register of 2^L states with the work
  // register in the low bits: accepts x iff x < N and oracle k accepts x.
  OraclePredicate predicate(std::int64_t k, int L) const;

 private:
  std::uint64_t N_ = 0;
  std::int64_t inv_ = 0;
  double eta_ = 0.0;
  double root_eta_n_ = 0.0;
  std::function<double(std::uint64_t)> p_;
  std::vector<std::int32_t> kx_;
  std::vector<std::uint64_t> n_;
};

struct ExceptionReport {
  std::uint64_t count = 0;        // |{x : staircases disagree}|
  double probability_mass = 0.0;  // sum of p(x) over that set
  std::uint64_t before_first = 0; // first accepted below the first selected oracle
  std::uint64_t interior = 0;     // first accepted between selected oracles
  std::uint64_t tail = 0;         // never accepted by a selected oracle
  std::vector<std::uint64_t> sample;  // up to 64 smallest members
};

ExceptionReport scan_exceptions(const OracleBank& bank, std::span<const std::int64_t> f);

// 4 eta_c/eps + eta_g + eta_c: guaranteed ceiling on |exceptions|/N whenever
// the selection ran on counts within eta_c N of truth and the first selected
// count is below (eta_g + eta_c) N.
double exception_fraction_bound(Recip epsilon, double eta_c, double eta_g);

}  // namespace qsp
