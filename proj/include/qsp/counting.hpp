// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qsp/common.hpp"
#include "qsp/oracle_bank.hpp"
#include "qsp/scenario.hpp"

namespace qsp {

// Outcome distribution of phase-estimation counting of M marked states in a
// doubled search space of D states with a 2^a_c-point register. The register
// reading b estimates the rotation angle of one amplification step; decoding
// gives the count estimate D sin^2(pi b / 2^a_c).
struct CountingDistribution {
  std::int64_t R = 0;             // 2^a_c
  std::uint64_t domain = 0;       // D (doubled space, so M/D <= 1/2)
  std::uint64_t solutions = 0;    // M
  double f = 0.0;                 // eigenphase asin(sqrt(M/D))/pi
  std::vector<double> pmf;        // size R
  std::vector<double> cdf;        // inclusive prefix sums of pmf
};

// Cached by (M, D, a_c); the distribution is a pure function of its key.
std::shared_ptr<const CountingDistribution> counting_distribution(std::uint64_t M,
                                                                  std::uint64_t D, int a_c);

double decode_count(std::int64_t b, std::int64_t R, std::uint64_t D);

// Inverse-CDF draw using one uniform variate in [0, 1).
std::int64_t sample_outcome(const CountingDistribution& dist, double u);

// Probability that the decoded estimate lands strictly within tol of M.
double in_contract_mass(const CountingDistribution& dist, double tol);

// Oracle applications consumed by one sampled estimate: 2^a_c - 1.
std::uint64_t counting_calls_per_estimate(int a_c);

struct CountEstimate {
  std::uint64_t true_count = 0;
  double estimate = 0.0;
  std::int64_t outcome = -1;  // register reading; -1 in exact mode
  bool exact = false;
};

// One estimate per oracle k = 1..1/eps. Exact mode copies the true counts and
// consumes nothing; sampled mode draws one register reading per oracle and
// charges 2^a_c - 1 oracle calls each.
std::vector<CountEstimate> estimate_all(const OracleBank& bank, const AccuracyParams& params,
                                        Rng& rng, ExecContext& ctx);

}  // namespace qsp
