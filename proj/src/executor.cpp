// SPDX-License-Identifier: Apache-2.0
#include "qsp/executor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qsp/kernels.hpp"

namespace qsp {

StageOneResult prepare_magnitude(const OracleBank& bank, const Schedule& schedule,
                                 const AccuracyParams& params, int max_retries, Rng& rng,
                                 ExecContext& ctx) {
  if (max_retries < 0) throw ScenarioError("retry budget must be non-negative");
  const int n = std::countr_zero(bank.domain());
  const int L = n + params.a;
  std::vector<OraclePredicate> preds;
  preds.reserve(schedule.f.size());
  for (const std::int64_t fk : schedule.f) preds.push_back(bank.predicate(fk, L));

  StageOneResult res;
  const int attempts_allowed = 1 + max_retries;
  for (int attempt = 0; attempt < attempts_allowed; ++attempt) {
    QuantumState st = uniform_state(L, ctx);
    for (std::size_t k = 0; k < preds.size(); ++k) {
      st = apply_grover(st, preds[k], schedule.t[k], ctx);
    }
    const MeasureResult m = measure_aux(st, params.a, rng, ctx);
    res.attempts = attempt + 1;
    res.success_probability = m.success_probability;
    res.log.push_back({m.success, m.success_probability});
    if (m.success) {
      res.success = true;
      res.state = std::move(*m.collapsed);
      break;
    }
  }
  return res;
}

double imprinted_phase(double phi, Recip eps_prime) {
  const std::int64_t inv = eps_prime.inv;
  const double ep = eps_prime.value();
  auto shifted = [phi, ep](std::int64_t k) { return phi > (double(k) - 0.5) * ep; };
  std::int64_t m = std::int64_t(std::floor(phi / ep + 0.5));
  m = std::clamp<std::int64_t>(m, 0, inv);
  while (m > 0 && !shifted(m)) --m;
  while (m < inv && shifted(m + 1)) ++m;
  // correctly-rounded division lands exactly on representable rungs
  return double(m) / double(inv);
}

QuantumState apply_phases(const QuantumState& state, const TargetSpec& spec, bool strict,
                          ExecContext& ctx) {
  if (state.dim() != spec.N) {
    throw ComputeError("phase stage expects the collapsed work register");
  }
  QuantumState out = state;
  const std::int64_t inv = spec.epsilon_prime.inv;
  const double ep = spec.epsilon_prime.value();
  if (strict) {
    // one conditional shift per ladder rung, with no fusing
    const cplx rung = std::polar(1.0, 2.0 * std::numbers::pi * ep);
    for (std::int64_t k = 1; k <= inv; ++k) {
      const double cut = (double(k) - 0.5) * ep;
      for (std::uint64_t x = 0; x < spec.N; ++x) {
        if (spec.phi(x) > cut) out.amp[x] *= rung;
      }
    }
  } else {
    const std::int64_t n = std::int64_t(spec.N);
#pragma omp parallel for if (ctx.policy == ExecPolicy::Parallel && n >= 4096)
    for (std::int64_t x = 0; x < n; ++x) {
      const double ph = imprinted_phase(spec.phi(std::uint64_t(x)), spec.epsilon_prime);
      out.amp[std::size_t(x)] *= std::polar(1.0, 2.0 * std::numbers::pi * ph);
    }
  }
  ctx.phase_ops += std::uint64_t(inv);
  return out;
}

RunReport run_full(const TargetSpec& spec, const RunOptions& opt) {
  TargetSpec local = spec;
  if (opt.counting_mode) local.overrides.counting_mode = opt.counting_mode;
  const AccuracyParams P = resolve_params(local);

  RunReport rep;
  rep.scenario_name = local.name;
  rep.scenario_json = local.raw_json;
  rep.family_desc = local.family_desc;
  rep.phi_desc = local.phi_desc;
  rep.seed = opt.seed ? *opt.seed : local.seed;
  rep.N = local.N;
  rep.eta = local.eta;
  rep.lambda = local.lambda;
  rep.epsilon_prime = local.epsilon_prime;
  rep.params = P;
  rep.strict_phases = opt.strict_phases;
  rep.ctx.policy = opt.policy;
  rep.ctx.max_qubits = opt.max_qubits;

  if (local.n_qubits + P.a > opt.max_qubits) {
    throw ResourceError("run needs " + std::to_string(local.n_qubits + P.a) +
                        " qubits (work " + std::to_string(local.n_qubits) + " + aux " +
                        std::to_string(P.a) + "), above the limit of " +
                        std::to_string(opt.max_qubits));
  }

  Rng root(rep.seed);
  Rng counting_rng = root.child(0x636f756e74ULL);  // independent stream per purpose
  Rng measure_rng = root.child(0x6d656173ULL);

  const OracleBank bank(local, P.epsilon, opt.policy);
  rep.true_counts = bank.counts();
  rep.estimates = estimate_all(bank, P, counting_rng, rep.ctx);
  rep.estimate_in_contract.resize(rep.estimates.size());
  for (std::size_t j = 0; j < rep.estimates.size(); ++j) {
    const bool ok = std::abs(rep.estimates[j].estimate - double(rep.true_counts[j])) <
                    P.eta_c * double(local.N);
    rep.estimate_in_contract[j] = ok;
    if (!ok) rep.all_estimates_in_contract = false;
  }
  if (!rep.all_estimates_in_contract) {
    std::string which;
    for (std::size_t j = 0; j < rep.estimate_in_contract.size(); ++j) {
      if (!rep.estimate_in_contract[j]) which += (which.empty() ? "" : ",") + std::to_string(j + 1);
    }
    rep.ctx.notes.push_back("counting draw out of contract for oracle(s) " + which +
                            "; accuracy-dependent guarantees are not in force for this run");
  }

  rep.schedule = build_schedule(bank, rep.estimates, P, local);
  rep.exceptions = scan_exceptions(bank, rep.schedule.f);

  // closed-form record of what those integer times actually build
  std::vector<double> true_widths(rep.schedule.f.size());
  for (std::size_t k = 0; k < rep.schedule.f.size(); ++k) {
    true_widths[k] = double(rep.true_counts[std::size_t(rep.schedule.f[k] - 1)]);
  }
  const RealizedEvolution ev = evolve_features(rep.schedule.t, true_widths,
                                               rep.schedule.two_a_n());
  rep.realized_h = ev.h;
  rep.background = ev.background.empty() ? 1.0 / std::sqrt(rep.schedule.two_a_n())
                                         : ev.background.back();

  StageOneResult stage1 =
      prepare_magnitude(bank, rep.schedule, P, opt.max_retries, measure_rng, rep.ctx);
  rep.prepared = stage1.success;
  rep.attempts = stage1.attempts;
  rep.success_probability = stage1.success_probability;
  rep.p_fail_exact = 1.0 - stage1.success_probability;

  if (stage1.success) {
    rep.stage1_state = std::move(stage1.state);
    const QuantumState mag = magnitude_target(local, opt.policy);
    rep.fidelity_stage1 = std::abs(kernels::inner(mag.amp, rep.stage1_state.amp, opt.policy));
    rep.final_state = apply_phases(rep.stage1_state, local, opt.strict_phases, rep.ctx);
    const QuantumState target = target_state(local, opt.policy);
    rep.fidelity_total = std::abs(kernels::inner(target.amp, rep.final_state.amp, opt.policy));
  } else {
    rep.ctx.notes.push_back("preparation failed " + std::to_string(stage1.attempts) +
                            " post-selection attempt(s); no state was produced");
  }
  return rep;
}

}  // namespace qsp
