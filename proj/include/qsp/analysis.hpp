// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsp/executor.hpp"
#include "qsp/oracle_bank.hpp"
#include "qsp/scenario.hpp"
#include "qsp/state.hpp"

namespace qsp {

// One evaluated inequality. For upper bounds lhs is the achieved value and
// rhs the cap; for lower bounds lhs is the floor and rhs the achieved value;
// for identities pass means exact equality. In every case margin = rhs - lhs,
// so margin >= 0 whenever the check passes.
struct AuditRow {
  std::string name;   // stable slug
  std::string bound;  // the inequality as a human-readable formula
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  bool hard = true;  // analytic guarantee at these parameters (vs informational)
  bool applicable = true;
  std::string note;
};

// Full set of analytic checks evaluated against one run, plus the quantities
// recomputed from their definitions for traceability.
struct BoundAudit {
  std::vector<AuditRow> rows;
  double U = 0.0;       // linear coefficient of the background quadratic
  double V = 0.0;       // constant coefficient of the background quadratic
  double Lambda = 0.0;  // exception correction to the normalization sum
  double mu = 0.0;      // guaranteed ceiling on the exception fraction
  double d_max = 0.0;   // largest accumulated height error over any band
  double h_delta_max = 0.0;  // largest single-step height error

  std::size_t hard_failures() const;
  bool hard_ok() const { return hard_failures() == 0; }
  const AuditRow* find(const std::string& name) const;
};

// Evaluates the feature/height/background/fidelity bounds with exact
// simulation quantities. Checks whose derivation assumes the standard
// accuracy parameters and in-contract count estimates are downgraded to
// informational when either premise is absent.
BoundAudit audit_run(const RunReport& rep, const TargetSpec& spec,
                     ExecPolicy policy = ExecPolicy::Parallel);

// Resource rows: oracle calls and qubit counts of one run against their
// analytic caps. Integer-granularity forms are the hard rows; the idealized
// real-valued caps are reported informationally (they are violated by
// rounding alone at some parameter points).
std::vector<AuditRow> resource_table(const RunReport& rep);

// Asserts |asin(x+v) - asin(x)| <= 2 sqrt|v| and the same for acos over a
// uniform grid with |v| <= 1/4 and x, x+v in [-1, 1]. grid_size is the
// approximate total number of (x, v) points; must be at least 100.
std::vector<AuditRow> verify_trig_inequalities(int grid_size);

// Amplitude profile in descending order (stable index tie-break), paired with
// the target and both staircase levels at the same permutation.
struct ProfileRow {
  std::uint64_t rank = 0;
  std::uint64_t index = 0;
  double amplitude = 0.0;
  double sqrt_p = 0.0;
  double sqrt_p_prime = 0.0;
  double sqrt_p_dprime = 0.0;
};
std::vector<ProfileRow> sorted_profile(const QuantumState& state, const TargetSpec& spec,
                                       const OracleBank& bank,
                                       std::span<const std::int64_t> f);
std::string profile_csv(const std::vector<ProfileRow>& rows);

// One grid point of a sweep: a scenario with overrides already applied plus
// the label identifying the point in the output table.
struct SweepPoint {
  TargetSpec spec;
  std::string point;  // "" for the bare scenario
};

struct SweepRow {
  std::string scenario;
  std::string point;
  std::uint64_t seed = 0;
  bool ok = false;           // run completed (prepared or honestly failed)
  std::string error;         // exception text when ok is false
  std::string epsilon;
  std::string counting_mode;
  std::size_t steps = 0;
  int attempts = 0;
  bool prepared = false;
  double success_probability = 0.0;
  double p_fail_exact = 0.0;
  double fidelity_stage1 = 0.0;
  double fidelity_total = 0.0;
  std::uint64_t exceptions = 0;
  bool in_contract = false;
  std::size_t audit_hard_total = 0;
  std::size_t audit_hard_failures = 0;
};

// Runs every (point, seed) pair, never aborting on individual failures, and
// returns rows sorted by (scenario, point, seed).
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points,
                            const std::vector<std::uint64_t>& seeds,
                            const RunOptions& base);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Structured report rendering (key order fixed, byte-deterministic for a
// given run).
nlohmann::ordered_json audit_to_json(const BoundAudit& audit);
nlohmann::ordered_json rows_to_json(const std::vector<AuditRow>& rows);
nlohmann::ordered_json report_to_json(const RunReport& rep);
std::string render_report(const RunReport& rep, const BoundAudit& audit,
                          const std::vector<AuditRow>& resources);

}  // namespace qsp
