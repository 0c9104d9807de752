// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "qsp/analysis.hpp"
#include "qsp/executor.hpp"
#include "qsp/scenario.hpp"

using namespace qsp;

namespace {

TargetSpec load(const std::string& body) {
  return load_scenario_text("{" + body + "}", "inline");
}

const char* kTwoLevel =
    R"("N": 64, "family": "two_level",
       "family_params": {"high_fraction": 0.5, "low_to_high_ratio": 0.53},
       "eta": 0.765, "lambda": 0.99,
       "overrides": {"counting_mode": "exact"})";

RunReport run_two_level(TargetSpec& spec) {
  spec = load(kTwoLevel);
  RunOptions opt;
  opt.seed = 5;
  return run_full(spec, opt);
}

}  // namespace

TEST_CASE("arcsine and arccosine difference caps hold on a dense grid") {
  const std::vector<AuditRow> rows = verify_trig_inequalities(10000);
  REQUIRE(rows.size() == 2);
  for (const AuditRow& r : rows) {
    CHECK(r.pass);
    CHECK(r.hard);
    CHECK(r.lhs <= 0.0);
  }
  // the extremal corner: x = -1 shifted by the full quarter unit
  CHECK(std::abs(std::asin(-0.75) - std::asin(-1.0)) ==
        doctest::Approx(0.7227342478134157).epsilon(1e-12));
  CHECK(std::abs(std::asin(0.25) - std::asin(0.0)) ==
        doctest::Approx(0.25268025514207865).epsilon(1e-12));
  CHECK_THROWS_AS(verify_trig_inequalities(99), ComputeError);
}

TEST_CASE("every hard bound holds on the two-level benchmark run") {
  TargetSpec spec;
  const RunReport rep = run_two_level(spec);
  REQUIRE(rep.prepared);
  const BoundAudit audit = audit_run(rep, spec);
  CHECK(audit.hard_ok());

  const AuditRow* h = audit.find("height_error");
  REQUIRE(h != nullptr);
  CHECK(h->hard);
  CHECK(h->pass);
  CHECK(h->lhs == doctest::Approx(0.0032).epsilon(0.15));
  CHECK(h->rhs == doctest::Approx(0.0625 / std::sqrt(0.765 * 64)).epsilon(1e-12));

  // exact counting mode: estimated and true rotation quantities coincide
  const AuditRow* w = audit.find("rotation_angle_ratio");
  REQUIRE(w != nullptr);
  CHECK(w->lhs == 0.0);
  CHECK(audit.find("separation_ratio")->lhs == 0.0);

  // no selected-oracle misclassifications for this target
  CHECK(audit.find("exception_count")->lhs == 0.0);
  CHECK(audit.find("quadratic_residual")->pass);
  CHECK(audit.find("failure_probability")->pass);
  CHECK(audit.find("failure_probability_identity")->pass);
  CHECK(audit.find("stage1_fidelity")->rhs == doctest::Approx(0.9996).epsilon(1e-3));
  // exact-lattice phases: the phase stage is lossless, so the whole
  // (eps'^2 / 8) * fidelity allowance is left as margin
  const AuditRow* ph = audit.find("phase_stage_ratio");
  REQUIRE(ph != nullptr);
  CHECK(ph->pass);
  CHECK(ph->rhs == doctest::Approx(rep.fidelity_stage1).epsilon(1e-12));
  CHECK(ph->margin ==
        doctest::Approx(0.01 / 8.0 * rep.fidelity_stage1).epsilon(1e-9));
}

TEST_CASE("hand-tuned accuracy parameters downgrade guarantees to informational") {
  const TargetSpec spec = load(
      R"("N": 64, "family": "uniform", "eta": 0.9, "lambda": 0.85,
         "overrides": {"eta_g": 0.2, "a": 5, "counting_mode": "exact"})");
  RunOptions opt;
  opt.seed = 2;
  const RunReport rep = run_full(spec, opt);
  CHECK_FALSE(rep.params.worst_case);
  const BoundAudit audit = audit_run(rep, spec);
  const AuditRow* h = audit.find("height_error");
  REQUIRE(h != nullptr);
  CHECK_FALSE(h->hard);
  CHECK(h->note.find("overridden") != std::string::npos);
  CHECK_FALSE(audit.find("mu_below_eps2")->hard);
  // construction-level checks stay hard regardless of parameter overrides
  CHECK(audit.find("staircase_floor_error")->hard);
  CHECK(audit.find("quadratic_residual")->hard);
}

TEST_CASE("resource rows: exact-mode run") {
  TargetSpec spec;
  const RunReport rep = run_two_level(spec);
  const std::vector<AuditRow> rows = resource_table(rep);
  auto find = [&rows](const std::string& name) -> const AuditRow* {
    for (const AuditRow& r : rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  };

  const AuditRow* prep = find("prep_calls_attempt");
  REQUIRE(prep != nullptr);
  CHECK(prep->lhs == 10.0);  // t = (3, 7)
  CHECK(prep->rhs == doctest::Approx(1206.3715789784806).epsilon(1e-12));
  CHECK(prep->pass);
  CHECK(find("prep_calls_step")->pass);
  CHECK(find("prep_calls_total")->pass);

  const AuditRow* aux = find("aux_qubits");
  CHECK(aux->lhs == 9.0);
  CHECK(aux->rhs == 9.0);  // boundary equality at eps = 1/4
  CHECK(aux->pass);

  // the idealized search-space cap is genuinely exceeded by the rounded-up a
  const AuditRow* cap = find("search_space_cap");
  CHECK(cap->lhs == 512.0);
  CHECK(cap->rhs == 448.0);
  CHECK_FALSE(cap->pass);
  CHECK_FALSE(cap->hard);
  CHECK(find("search_space_floor")->pass);
  CHECK(find("search_space_ratio_cap")->pass);

  const AuditRow* cc = find("counting_calls");
  CHECK_FALSE(cc->applicable);
  CHECK(cc->lhs == 0.0);
  CHECK(find("phase_ops")->pass);
}

TEST_CASE("resource rows: sampled-mode counting budget") {
  const TargetSpec spec = load(
      R"("N": 64, "family": "uniform", "eta": 0.9, "lambda": 0.85)");
  RunOptions opt;
  opt.seed = 9;
  const RunReport rep = run_full(spec, opt);
  CHECK(rep.params.a_c == 19);
  const std::vector<AuditRow> rows = resource_table(rep);
  auto find = [&rows](const std::string& name) -> const AuditRow* {
    for (const AuditRow& r : rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  };

  // integer-granularity forms hold (with equality at these parameters) ...
  const AuditRow* q = find("counting_qubits");
  CHECK(q->lhs == 19.0);
  CHECK(q->rhs == 19.0);
  CHECK(q->pass);
  CHECK(q->hard);
  const AuditRow* c = find("counting_calls");
  CHECK(c->lhs == 2097148.0);
  CHECK(c->rhs == 2097148.0);
  CHECK(c->pass);
  CHECK(find("counting_calls_identity")->pass);

  // ... while the idealized real-valued caps are exceeded by rounding alone
  const AuditRow* qr = find("counting_qubits_unrounded");
  CHECK(qr->rhs == doctest::Approx(18.562242424221073).epsilon(1e-12));
  CHECK_FALSE(qr->pass);
  CHECK_FALSE(qr->hard);
  const AuditRow* cr = find("counting_calls_unrounded");
  CHECK(cr->rhs == doctest::Approx(1548288.0).epsilon(1e-12));
  CHECK_FALSE(cr->pass);
  CHECK_FALSE(cr->hard);
}

TEST_CASE("profile rows come out sorted with matching staircase columns") {
  TargetSpec spec;
  const RunReport rep = run_two_level(spec);
  REQUIRE(rep.prepared);
  const OracleBank bank(spec, rep.params.epsilon);
  const std::vector<ProfileRow> rows =
      sorted_profile(rep.stage1_state, spec, bank, rep.schedule.f);
  REQUIRE(rows.size() == 64);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK(rows[i].amplitude >= rows[i + 1].amplitude);
  }
  // two plateaus of 32 in the target follow the amplitude ordering
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(rows[i].sqrt_p == doctest::Approx(rows[0].sqrt_p).epsilon(1e-12));
    CHECK(rows[i + 32].sqrt_p == doctest::Approx(rows[63].sqrt_p).epsilon(1e-12));
  }
  CHECK(rows[0].sqrt_p > rows[63].sqrt_p);
  const std::string csv = profile_csv(rows);
  CHECK(csv.rfind("rank,index,amplitude,sqrt_p,sqrt_p_prime,sqrt_p_dprime\n", 0) == 0);

  QuantumState wrong;
  wrong.L = rep.stage1_state.L + 1;
  wrong.amp.assign(rep.stage1_state.amp.size() * 2, cplx{0.0, 0.0});
  CHECK_THROWS_AS(sorted_profile(wrong, spec, bank, rep.schedule.f), ComputeError);
}

TEST_CASE("sweep rows: deterministic schedules, sorted output, isolated failures") {
  std::vector<SweepPoint> points;
  points.push_back({load(kTwoLevel), ""});
  RunOptions base;
  const std::vector<SweepRow> rows = sweep(points, {3, 1, 2}, base);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].seed == 1);  // sorted by seed
  CHECK(rows[2].seed == 3);
  for (const SweepRow& r : rows) {
    CHECK(r.ok);
    CHECK(r.steps == 2);  // exact counting: identical schedule for every seed
    CHECK(r.p_fail_exact == rows[0].p_fail_exact);
    CHECK(r.audit_hard_failures == 0);
  }

  // a run that cannot fit its register is recorded, not propagated
  points.push_back({load(R"("N": 1048576, "family": "uniform",
                            "eta": 0.9, "lambda": 0.85)"),
                    "oversized"});
  const std::vector<SweepRow> rows2 = sweep(points, {1}, base);
  REQUIRE(rows2.size() == 2);
  bool saw_error = false;
  for (const SweepRow& r : rows2) {
    if (!r.ok) {
      saw_error = true;
      CHECK(r.error.find("qubits") != std::string::npos);
    }
  }
  CHECK(saw_error);

  const std::string csv = sweep_csv(rows2);
  CHECK(csv.rfind("scenario,point,seed,status,error,", 0) == 0);
  CHECK(sweep_csv({}).find('\n') == sweep_csv({}).size() - 1);  // header only
}

TEST_CASE("rendered reports are byte-identical for identical runs") {
  TargetSpec spec;
  const RunReport rep1 = run_two_level(spec);
  const RunReport rep2 = run_two_level(spec);
  const BoundAudit a1 = audit_run(rep1, spec);
  const BoundAudit a2 = audit_run(rep2, spec);
  const std::string r1 = render_report(rep1, a1, resource_table(rep1));
  const std::string r2 = render_report(rep2, a2, resource_table(rep2));
  CHECK(r1 == r2);
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(r1);
  CHECK(j.contains("scenario"));
  CHECK(j.contains("audit"));
  CHECK(j["audit"]["hard_ok"].get<bool>());
  CHECK(j.contains("resource_table"));
  CHECK(j["params"]["epsilon"].get<std::string>() == "1/4");
}
