// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsp/common.hpp"
#include "qsp/counting.hpp"
#include "qsp/oracle_bank.hpp"
#include "qsp/scenario.hpp"

namespace qsp {

// Per-step quantities of the average-amplitude rotation picture: rotation
// angle omega, rotation amplitude alpha, normalized separations gamma before
// and after the step, and the real-valued step count tau that would land
// exactly on the target separation.
struct StepPredict {
  double alpha = 0.0;
  double omega = 0.0;
  double gamma_ini = 0.0;
  double gamma_fin = 0.0;
  double tau = 0.0;
  bool clamped = false;  // an arcsine argument had to be clamped into [-1, 1]
};

// Index selection over per-oracle count estimates (1-based oracle indices;
// estimates[j-1] estimates oracle j). The first pick is the first index whose
// estimate reaches `threshold`; each later pick is the first strictly larger
// estimate strictly below index inv_eps. Throws ComputeError when nothing
// reaches the threshold.
std::vector<std::int64_t> select_oracles(std::span<const double> estimates, double threshold,
                                         std::int64_t inv_eps);

// delta_k = eps (f_{k+1} - f_k)/sqrt(eta N) with the sentinel f_{T+1} = 1/eps
std::vector<double> step_targets(std::span<const std::int64_t> f, Recip epsilon, double eta,
                                 std::uint64_t N);

// Rotation-picture prediction for a staircase of feature heights H over
// accepted-set widths W (non-decreasing) inside a register of two_aN states.
// Used three ways: (targets, estimated widths) gives the integer times,
// (targets, true widths) gives the ideal real-valued times, and
// (realized heights, true widths) reproduces the actual run.
std::vector<StepPredict> predict_steps(std::span<const double> heights,
                                       std::span<const double> widths, double two_aN,
                                       std::vector<std::string>* notes = nullptr);

// Exact closed-form evolution of the staircase under integer Grover times:
// feature heights picked up at each step plus the flat level left outside the
// accepted set (signed: over-rotation is represented faithfully).
struct RealizedEvolution {
  std::vector<double> h;
  std::vector<double> background;
  std::vector<double> solution_avg;
};
RealizedEvolution evolve_features(std::span<const std::int64_t> t,
                                  std::span<const double> widths, double two_aN);

// Background level after the last step from the normalization quadratic;
// valid whenever the background is non-negative.
double background_level(std::span<const double> heights, std::span<const double> widths,
                        double two_aN);

struct Schedule {
  std::vector<std::int64_t> f;        // selected oracle indices, ascending
  std::vector<double> delta;          // target feature heights
  std::vector<double> n_tilde;        // count estimates the plan was built on
  std::vector<std::int64_t> t;        // integer Grover times
  std::vector<StepPredict> predicted; // rotation quantities behind each t
  std::vector<std::string> notes;     // clamp events and other anomalies
  std::int64_t inv_eps = 0;
  int a = 0;
  double eta = 0.0;
  std::uint64_t N = 0;

  double two_a_n() const { return std::ldexp(double(N), a); }
  std::size_t steps() const { return f.size(); }
};

Schedule build_schedule(const OracleBank& bank, std::span<const CountEstimate> estimates,
                        const AccuracyParams& params, const TargetSpec& spec);

}  // namespace qsp
