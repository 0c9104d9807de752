// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "qsp/executor.hpp"
#include "qsp/kernels.hpp"
#include "qsp/scenario.hpp"

using namespace qsp;

namespace {

TargetSpec load(const std::string& body) {
  return load_scenario_text("{" + body + "}", "inline");
}

const char* kUniform64 =
    R"("N": 64, "family": "uniform", "eta": 0.9, "lambda": 0.85,
       "overrides": {"counting_mode": "exact"})";

}  // namespace

TEST_CASE("conditional-shift ladder rounds phases to the nearest rung") {
  const Recip ep{10};
  CHECK(imprinted_phase(0.3, ep) == 0.3);    // already on the lattice
  CHECK(imprinted_phase(0.349, ep) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(imprinted_phase(0.351, ep) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(imprinted_phase(0.0, ep) == 0.0);
  CHECK(imprinted_phase(0.05, ep) == 0.0);   // boundary comparisons are strict
  CHECK(imprinted_phase(0.96, ep) == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 1000; ++i) {
    const double phi = double(i) / 1000.0;
    CHECK(std::abs(imprinted_phase(phi, ep) - phi) <= 0.05 + 1e-12);
  }
}

TEST_CASE("fused and strict phase application agree") {
  const TargetSpec s = load(
      R"("N": 64, "family": "uniform", "phi_family": "jittered_ramp",
         "phi_params": {"step": 3, "jitter": 0.004},
         "eta": 0.9, "lambda": 0.85)");
  ExecContext ctx;
  const QuantumState base = magnitude_target(s);
  QuantumState in;
  in.L = 6;
  in.amp = base.amp;
  ExecContext c1, c2;
  const QuantumState fused = apply_phases(in, s, false, c1);
  const QuantumState strict = apply_phases(in, s, true, c2);
  CHECK(kernels::max_abs_diff(fused.amp, strict.amp, ExecPolicy::Serial) < 1e-12);
  CHECK(c1.phase_ops == 10);
  CHECK(c2.phase_ops == 10);
}

TEST_CASE("uniform benchmark: exact fidelity one and the known failure rate") {
  const TargetSpec s = load(kUniform64);
  RunOptions opt;
  opt.seed = 3;
  const RunReport rep = run_full(s, opt);
  REQUIRE(rep.prepared);
  CHECK(rep.params.epsilon.inv == 4);  // natural choice from lambda*eta/3 = 0.255
  CHECK(rep.params.a == 9);
  CHECK(rep.schedule.f == std::vector<std::int64_t>{1});
  CHECK(rep.fidelity_stage1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.fidelity_total == doctest::Approx(1.0).epsilon(1e-12));  // zero phases
  // the closed-form background reproduces the measured failure probability
  const double closed = (rep.schedule.two_a_n() - double(rep.N)) * rep.background *
                        rep.background;
  CHECK(rep.p_fail_exact == doctest::Approx(closed).epsilon(1e-10));
  CHECK(rep.p_fail_exact < 10.0 * rep.lambda);
  CHECK(rep.p_fail_exact == doctest::Approx(0.358).epsilon(0.05));
}

TEST_CASE("resource counters scale with post-selection attempts") {
  const TargetSpec s = load(kUniform64);
  RunOptions opt;
  opt.seed = 3;
  const RunReport rep = run_full(s, opt);
  REQUIRE(rep.prepared);
  std::uint64_t per_attempt = 0;
  for (const std::int64_t t : rep.schedule.t) per_attempt += std::uint64_t(t);
  CHECK(rep.ctx.prep_oracle_calls == std::uint64_t(rep.attempts) * per_attempt);
  CHECK(rep.ctx.counting_oracle_calls == 0);  // exact mode
  CHECK(rep.ctx.phase_ops == 10);
}

TEST_CASE("runs with the same seed are identical, other seeds may differ") {
  const TargetSpec s = load(kUniform64);
  RunOptions opt;
  opt.seed = 11;
  const RunReport a = run_full(s, opt);
  const RunReport b = run_full(s, opt);
  CHECK(a.attempts == b.attempts);
  CHECK(a.fidelity_total == b.fidelity_total);
  CHECK(a.p_fail_exact == b.p_fail_exact);
  REQUIRE(a.final_state.amp.size() == b.final_state.amp.size());
  for (std::size_t i = 0; i < a.final_state.amp.size(); ++i) {
    CHECK(a.final_state.amp[i] == b.final_state.amp[i]);
  }
}

TEST_CASE("terminal selection: a zero-step plan still post-selects correctly") {
  // flat target far below the ceiling: only the all-accepting oracle is
  // selected, no amplification happens, and post-selection alone does the job
  const TargetSpec s = load(
      R"("N": 64, "family": "uniform", "eta": 0.05, "lambda": 0.9,
         "overrides": {"epsilon": "1/4", "counting_mode": "exact", "a": 3})");
  RunOptions opt;
  opt.seed = 1;
  opt.max_retries = 100;  // success probability per attempt is only 1/8
  const RunReport rep = run_full(s, opt);
  REQUIRE(rep.prepared);
  CHECK(rep.schedule.f == std::vector<std::int64_t>{4});
  CHECK(rep.schedule.t == std::vector<std::int64_t>{0});
  CHECK(rep.success_probability == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  CHECK(rep.fidelity_stage1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a zero retry budget reports an honest failure") {
  const TargetSpec s = load(
      R"("N": 64, "family": "uniform", "eta": 0.05, "lambda": 0.9,
         "overrides": {"epsilon": "1/4", "counting_mode": "exact", "a": 3}, "seed": 4)");
  RunOptions opt;
  opt.max_retries = 0;
  const RunReport rep = run_full(s, opt);  // seed 4 draws above 1/8 first
  if (!rep.prepared) {
    CHECK(rep.attempts == 1);
    CHECK(rep.fidelity_total == 0.0);
    CHECK(rep.final_state.amp.empty());
    REQUIRE_FALSE(rep.ctx.notes.empty());
    CHECK(rep.ctx.notes.back().find("failed") != std::string::npos);
  } else {
    CHECK(rep.attempts == 1);  // lucky seed: still a single attempt
  }
}

TEST_CASE("register demand above the qubit budget is refused up front") {
  const TargetSpec s = load(
      R"("N": 1048576, "family": "uniform", "eta": 0.9, "lambda": 0.85)");
  CHECK_THROWS_AS(run_full(s, RunOptions{}), ResourceError);
}

TEST_CASE("lattice phases are imprinted without any rounding loss") {
  const TargetSpec s = load(
      R"("N": 64, "family": "uniform", "phi_family": "lattice_ramp",
         "eta": 0.9, "lambda": 0.85, "overrides": {"counting_mode": "exact"})");
  RunOptions opt;
  opt.seed = 3;
  const RunReport rep = run_full(s, opt);
  REQUIRE(rep.prepared);
  CHECK(rep.fidelity_total == doctest::Approx(rep.fidelity_stage1).epsilon(1e-12));

  RunOptions strict = opt;
  strict.strict_phases = true;
  const RunReport rep2 = run_full(s, strict);
  CHECK(rep2.fidelity_total == doctest::Approx(rep.fidelity_total).epsilon(1e-12));
}
