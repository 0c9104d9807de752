// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qsp/common.hpp"
#include "qsp/kernels.hpp"

namespace qsp {

// Dense register of L qubits: 2^L complex amplitudes, unit norm.
// Auxiliary qubits occupy the high bit positions, so "aux all zero" is
// exactly x < 2^(L-a).
struct QuantumState {
  int L = 0;
  std::vector<cplx> amp;

  std::uint64_t dim() const { return 1ULL << L; }
};

// Basis-state predicate with a materialized bitmask for the simulator's inner
// loops. `solutions` caches the accepted-state count over the mask domain.
struct OraclePredicate {
  Bitmask mask;
  std::uint64_t solutions = 0;

  static OraclePredicate from_predicate(std::uint64_t domain,
                                        const std::function<bool(std::uint64_t)>& accept);
  bool test(std::uint64_t x) const { return mask.test(x); }
};

// Equal superposition over all 2^L basis states. Throws ResourceError when L
// exceeds ctx.max_qubits (message names the 2^L amplitude allocation).
QuantumState uniform_state(int L, const ExecContext& ctx);
QuantumState uniform_state(int L);

// t iterations of (2|u><u| - I) * O where |u> is the uniform state and O
// flips the sign of accepted basis states. Pure: returns the evolved copy.
// Increments ctx.prep_oracle_calls by t.
QuantumState apply_grover(const QuantumState& state, const OraclePredicate& oracle,
                          std::int64_t t, ExecContext& ctx);

// |<a|b>|; dimensions must match.
double fidelity(const QuantumState& a, const QuantumState& b,
                ExecPolicy policy = ExecPolicy::Parallel);

double norm_sq(const QuantumState& s, ExecPolicy policy = ExecPolicy::Parallel);

struct MeasureResult {
  bool success = false;             // aux register read all zero
  double success_probability = 0.0; // exact, sum over x < 2^(L-a)
  std::optional<QuantumState> collapsed;  // renormalized low register on success
};

// Measures the a auxiliary (high) qubits against the all-zero outcome.
MeasureResult measure_aux(const QuantumState& state, int a, Rng& rng, ExecContext& ctx);

}  // namespace qsp
