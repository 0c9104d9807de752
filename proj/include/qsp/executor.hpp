// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsp/common.hpp"
#include "qsp/counting.hpp"
#include "qsp/oracle_bank.hpp"
#include "qsp/scenario.hpp"
#include "qsp/schedule.hpp"
#include "qsp/state.hpp"

namespace qsp {

struct RunOptions {
  std::optional<std::uint64_t> seed;          // overrides the scenario seed
  int max_retries = 16;                       // extra post-selection attempts
  ExecPolicy policy = ExecPolicy::Parallel;
  bool strict_phases = false;                 // apply each conditional shift separately
  int max_qubits = 26;
  std::optional<CountingMode> counting_mode;  // overrides scenario/default mode
};

struct AttemptRecord {
  bool success = false;
  double success_probability = 0.0;
};

struct StageOneResult {
  QuantumState state;  // work register after a successful post-selection
  bool success = false;
  int attempts = 0;
  double success_probability = 0.0;  // exact, identical for every attempt
  std::vector<AttemptRecord> log;
};

// Amplitude staircase construction: repeat {uniform superposition, scheduled
// Grover steps, measure the aux register} until the aux bits read zero or the
// retry budget (attempts = 1 + max_retries) is exhausted.
StageOneResult prepare_magnitude(const OracleBank& bank, const Schedule& schedule,
                                 const AccuracyParams& params, int max_retries, Rng& rng,
                                 ExecContext& ctx);

// Phase a state x picks up from the ladder of 1/eps' conditional shifts:
// eps' times the number of rungs k with phi > (k - 1/2) eps'. Always within
// eps'/2 of phi.
double imprinted_phase(double phi, Recip eps_prime);

// Phase imprint stage. The fused path multiplies each amplitude by the net
// ladder phase in one pass; the strict path applies the 1/eps' conditional
// shifts one by one (identical up to rounding). Both charge 1/eps' phase ops.
QuantumState apply_phases(const QuantumState& state, const TargetSpec& spec, bool strict,
                          ExecContext& ctx);

struct RunReport {
  std::string scenario_name;
  std::string scenario_json;
  std::string family_desc;
  std::string phi_desc;
  std::uint64_t seed = 0;
  std::uint64_t N = 0;
  double eta = 0.0;
  double lambda = 0.0;
  Recip epsilon_prime{10};
  AccuracyParams params;

  Schedule schedule;
  std::vector<CountEstimate> estimates;      // one per oracle
  std::vector<std::uint64_t> true_counts;    // exact per-oracle counts
  std::vector<bool> estimate_in_contract;    // |estimate - count| < eta_c N, per oracle
  bool all_estimates_in_contract = true;

  bool prepared = false;
  int attempts = 0;
  double success_probability = 0.0;
  double p_fail_exact = 0.0;
  double fidelity_stage1 = 0.0;  // post-selected overlap with the magnitude target
  double fidelity_total = 0.0;   // final overlap with the phased target
  bool strict_phases = false;

  std::vector<double> realized_h;  // closed-form feature heights actually built
  double background = 0.0;         // closed-form level outside the last oracle
  ExceptionReport exceptions;

  ExecContext ctx;  // resource counters and notes

  QuantumState stage1_state;  // work register (empty when preparation failed)
  QuantumState final_state;
};

RunReport run_full(const TargetSpec& spec, const RunOptions& opt = {});

}  // namespace qsp
