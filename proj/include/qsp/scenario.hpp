// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "qsp/common.hpp"
#include "qsp/state.hpp"

namespace qsp {

enum class CountingMode { Exact, Sampled };

std::string to_string(CountingMode m);

struct Overrides {
  std::optional<Recip> epsilon;
  std::optional<double> eta_c;
  std::optional<double> eta_g;
  std::optional<int> a;
  std::optional<CountingMode> counting_mode;

  // true when any accuracy knob other than epsilon is forced by hand
  bool loosened() const { return eta_c || eta_g || a; }
};

// A validated preparation problem: probability and phase maps over [0, N),
// the eta-bound certificate, and requested accuracies.
struct TargetSpec {
  std::string name;
  std::uint64_t N = 0;
  int n_qubits = 0;  // log2 N
  double eta = 0.0;
  double lambda = 0.0;
  double nu = 0.1;
  Recip epsilon_prime{10};
  std::uint64_t seed = 0;
  Overrides overrides;
  std::function<double(std::uint64_t)> p;
  std::function<double(std::uint64_t)> phi;
  std::string family_desc;
  std::string phi_desc;
  std::string raw_json;  // compact echo for reports
};

struct AccuracyParams {
  Recip epsilon{4};
  double eta_c = 0.0;
  double eta_g = 0.0;
  int a = 0;    // preparation aux qubits
  int m = 0;    // counting precision qubits
  int a_c = 0;  // counting register qubits (0 when counting is exact)
  CountingMode counting_mode = CountingMode::Sampled;
  double nu_effective = 0.0;  // 0 in exact mode
  bool worst_case = true;     // eta_c/eta_g/a all derived from epsilon
};

// Largest epsilon with eps < lambda*eta/3 and 1/eps integer. Throws when the
// bound is non-positive or 1/eps would exceed max_inv.
Recip choose_epsilon(double lambda, double eta, std::int64_t max_inv = 1000000);

// eta_c = eps^5/54, eta_g = 0.99 eps^2, a = ceil(log2(eta_g/eta_c) - 3),
// m = ceil(log2(1/eta_c)), a_c = m + ceil(log2(2 + 1/(2 nu))) (nu > 0 only).
// Verifies the derived-parameter consequences that hold for the ceilinged a:
// a >= 3, 2^a > 6/eps^2, 2^a <= eta_g/(4 eta_c).
AccuracyParams worst_case_params(Recip epsilon, double nu = 0.0);

// choose_epsilon (or override) + worst_case_params + remaining overrides,
// with the 0 < eta_c < eta_g < 1/2 invariant revalidated after overrides.
AccuracyParams resolve_params(const TargetSpec& spec);

TargetSpec load_scenario(const std::string& path);
TargetSpec load_scenario_text(const std::string& json_text, const std::string& origin);

// sum_x sqrt(p(x)) e^{2 pi i phi(x)} |x> on n_qubits (no aux register)
QuantumState target_state(const TargetSpec& spec, ExecPolicy policy = ExecPolicy::Parallel);

// sum_x sqrt(p(x)) |x>, the magnitude-only stage-1 target
QuantumState magnitude_target(const TargetSpec& spec, ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace qsp
