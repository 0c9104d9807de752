// SPDX-License-Identifier: Apache-2.0
#include "qsp/state.hpp"

#include <cmath>
#include <string>

namespace qsp {

OraclePredicate OraclePredicate::from_predicate(
    std::uint64_t domain, const std::function<bool(std::uint64_t)>& accept) {
  OraclePredicate o;
  o.mask = Bitmask(domain);
  for (std::uint64_t x = 0; x < domain; ++x)
    if (accept(x)) o.mask.set(x);
  o.solutions = o.mask.count();
  return o;
}

QuantumState uniform_state(int L, const ExecContext& ctx) {
  if (L < 1) throw ScenarioError("uniform_state: L must be >= 1, got " + std::to_string(L));
  if (L > ctx.max_qubits) {
    double mib = static_cast<double>(1ULL << L) * sizeof(cplx) / (1024.0 * 1024.0);
    throw ResourceError("uniform_state: L=" + std::to_string(L) + " needs 2^" +
                        std::to_string(L) + " amplitudes (" + std::to_string(mib) +
                        " MiB), above the cap of " + std::to_string(ctx.max_qubits) +
                        " qubits");
  }
  QuantumState s;
  s.L = L;
  s.amp.assign(1ULL << L, cplx(std::sqrt(1.0 / static_cast<double>(1ULL << L)), 0.0));
  return s;
}

QuantumState uniform_state(int L) {
  ExecContext ctx;
  return uniform_state(L, ctx);
}

QuantumState apply_grover(const QuantumState& state, const OraclePredicate& oracle,
                          std::int64_t t, ExecContext& ctx) {
  if (t < 0) throw ScenarioError("apply_grover: negative iteration count");
  if (oracle.mask.n != state.dim())
    throw ScenarioError("apply_grover: oracle domain " + std::to_string(oracle.mask.n) +
                        " does not match state dimension " + std::to_string(state.dim()));
  QuantumState out = state;
  double inv_dim = 1.0 / static_cast<double>(out.dim());
  for (std::int64_t i = 0; i < t; ++i) {
    cplx flipped_sum = kernels::signed_sum(out.amp, oracle.mask, ctx.policy);
    kernels::grover_write(out.amp, oracle.mask, 2.0 * flipped_sum * inv_dim, ctx.policy);
  }
  ctx.prep_oracle_calls += static_cast<std::uint64_t>(t);
  return out;
}

double fidelity(const QuantumState& a, const QuantumState& b, ExecPolicy policy) {
  if (a.L != b.L)
    throw ScenarioError("fidelity: dimension mismatch (L=" + std::to_string(a.L) + " vs L=" +
                        std::to_string(b.L) + ")");
  return std::abs(kernels::inner(a.amp, b.amp, policy));
}

double norm_sq(const QuantumState& s, ExecPolicy policy) {
  return kernels::sum_sq(s.amp, policy);
}

MeasureResult measure_aux(const QuantumState& state, int a, Rng& rng, ExecContext& ctx) {
  if (a < 0 || a >= state.L)
    throw ScenarioError("measure_aux: aux qubit count " + std::to_string(a) +
                        " invalid for L=" + std::to_string(state.L));
  std::uint64_t low_dim = 1ULL << (state.L - a);
  MeasureResult r;
  r.success_probability = kernels::prefix_sum_sq(state.amp, low_dim, ctx.policy);
  r.success = rng.uniform() < r.success_probability;
  if (r.success) {
    QuantumState c;
    c.L = state.L - a;
    c.amp.assign(state.amp.begin(), state.amp.begin() + static_cast<std::ptrdiff_t>(low_dim));
    kernels::scale(c.amp, 1.0 / std::sqrt(r.success_probability), ctx.policy);
    r.collapsed = std::move(c);
  }
  return r;
}

}  // namespace qsp
