// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qsp/state.hpp"

using namespace qsp;

namespace {

// Independent dense-matrix model of one Grover iteration: G = D * O with
// O = diag(+-1) and D = 2/dim * ones - I. Used to pin expected values.
std::vector<cplx> matrix_grover(const std::vector<cplx>& in, const std::vector<bool>& accept,
                                int t) {
  std::size_t dim = in.size();
  std::vector<cplx> v = in;
  for (int step = 0; step < t; ++step) {
    std::vector<cplx> flipped(dim);
    for (std::size_t x = 0; x < dim; ++x) flipped[x] = accept[x] ? -v[x] : v[x];
    cplx total = 0.0;
    for (std::size_t x = 0; x < dim; ++x) total += flipped[x];
    for (std::size_t x = 0; x < dim; ++x)
      v[x] = 2.0 * total / static_cast<double>(dim) - flipped[x];
  }
  return v;
}

OraclePredicate single_target(std::uint64_t dim, std::uint64_t target) {
  return OraclePredicate::from_predicate(dim, [=](std::uint64_t x) { return x == target; });
}

}  // namespace

TEST_CASE("two-qubit Grover with one marked state amplifies exactly in one step") {
  ExecContext ctx;
  QuantumState s = uniform_state(2, ctx);
  QuantumState out = apply_grover(s, single_target(4, 2), 1, ctx);
  CHECK(std::abs(out.amp[2] - cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(out.amp[0]) < 1e-12);
  CHECK(std::abs(out.amp[1]) < 1e-12);
  CHECK(std::abs(out.amp[3]) < 1e-12);
  CHECK(ctx.prep_oracle_calls == 1);

  auto expect = matrix_grover(s.amp, {false, false, true, false}, 1);
  for (std::size_t x = 0; x < 4; ++x) CHECK(std::abs(out.amp[x] - expect[x]) < 1e-12);
}

TEST_CASE("apply_grover matches the dense-matrix model on random instances") {
  std::mt19937_64 eng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    int L = 2 + static_cast<int>(eng() % 7);  // 2..8
    std::uint64_t dim = 1ULL << L;
    QuantumState s;
    s.L = L;
    s.amp.resize(dim);
    double nrm = 0.0;
    for (auto& z : s.amp) {
      z = cplx(g(eng), g(eng));
      nrm += std::norm(z);
    }
    for (auto& z : s.amp) z /= std::sqrt(nrm);

    std::vector<bool> accept(dim);
    std::uint64_t r = 0;
    for (auto&& b : accept) {
      b = (eng() % 4) == 0;
      r += b;
    }
    if (r == 0) accept[dim / 2] = true;
    OraclePredicate oracle = OraclePredicate::from_predicate(
        dim, [&](std::uint64_t x) { return accept[x]; });
    int t = static_cast<int>(eng() % 21);

    ExecContext ctx;
    QuantumState out = apply_grover(s, oracle, t, ctx);
    auto expect = matrix_grover(s.amp, accept, t);
    double md = 0.0;
    for (std::uint64_t x = 0; x < dim; ++x) md = std::max(md, std::abs(out.amp[x] - expect[x]));
    CHECK(md < 1e-10);
    CHECK(std::abs(norm_sq(out) - 1.0) < 1e-10);  // unitarity
    CHECK(ctx.prep_oracle_calls == static_cast<std::uint64_t>(t));
  }
}

TEST_CASE("rejected-set amplitudes that start equal stay bitwise equal") {
  ExecContext ctx;
  QuantumState s = uniform_state(10, ctx);
  // perturb the accepted set only; rejected set stays at the uniform value
  OraclePredicate oracle =
      OraclePredicate::from_predicate(1ULL << 10, [](std::uint64_t x) { return x < 48; });
  for (std::uint64_t x = 0; x < 48; ++x) s.amp[x] *= 1.7;
  double nrm = std::sqrt(norm_sq(s));
  for (auto& z : s.amp) z /= nrm;

  QuantumState out = apply_grover(s, oracle, 13, ctx);
  cplx b0 = out.amp[48];
  double spread = 0.0;
  for (std::uint64_t x = 48; x < out.dim(); ++x)
    spread = std::max(spread, std::abs(out.amp[x] - b0));
  CHECK(spread == 0.0);
}

TEST_CASE("fidelity of the one-qubit uniform state against |0>") {
  ExecContext ctx;
  QuantumState u = uniform_state(1, ctx);
  QuantumState zero;
  zero.L = 1;
  zero.amp = {cplx(1.0, 0.0), cplx(0.0, 0.0)};
  CHECK(fidelity(u, zero) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("fidelity rejects dimension mismatch") {
  QuantumState a = uniform_state(2);
  QuantumState b = uniform_state(3);
  CHECK_THROWS_AS(fidelity(a, b), ScenarioError);
}

TEST_CASE("measure_aux failure probability for a flat background") {
  // N = 2^4 low states hold the target; a = 3 aux qubits; every x >= N at B
  int a = 3, n_low = 4;
  int L = a + n_low;
  std::uint64_t dim = 1ULL << L, N = 1ULL << n_low;
  double B = 0.004;
  double good = std::sqrt((1.0 - static_cast<double>(dim - N) * B * B) / static_cast<double>(N));
  QuantumState s;
  s.L = L;
  s.amp.assign(dim, cplx(B, 0.0));
  for (std::uint64_t x = 0; x < N; ++x) s.amp[x] = good;

  double expected_fail = static_cast<double>((1ULL << a) - 1) * static_cast<double>(N) * B * B;
  ExecContext ctx;
  Rng rng(42);
  MeasureResult r = measure_aux(s, a, rng, ctx);
  CHECK(r.success_probability == doctest::Approx(1.0 - expected_fail).epsilon(1e-12));

  // success statistics over many draws stay within 4 sigma
  int succ = 0, trials = 4000;
  Rng rng2(7);
  for (int i = 0; i < trials; ++i) succ += measure_aux(s, a, rng2, ctx).success;
  double p = 1.0 - expected_fail;
  double sigma = std::sqrt(p * (1.0 - p) / trials);
  CHECK(std::abs(succ / static_cast<double>(trials) - p) < 4 * sigma);
}

TEST_CASE("measure_aux collapse renormalizes the low register") {
  QuantumState s = uniform_state(6);
  ExecContext ctx;
  Rng rng(1);
  MeasureResult r = measure_aux(s, 2, rng, ctx);
  CHECK(r.success_probability == doctest::Approx(0.25).epsilon(1e-12));
  if (r.collapsed) {
    CHECK(r.collapsed->L == 4);
    CHECK(std::abs(norm_sq(*r.collapsed) - 1.0) < 1e-12);
  }
}

TEST_CASE("uniform_state enforces the qubit cap with the allocation in the message") {
  ExecContext ctx;
  ctx.max_qubits = 10;
  CHECK_THROWS_WITH_AS(uniform_state(11, ctx),
                       doctest::Contains("2^11"), ResourceError);
  CHECK_NOTHROW(uniform_state(10, ctx));
}

TEST_CASE("apply_grover output is bitwise reproducible") {
  ExecContext ctx;
  QuantumState s = uniform_state(14, ctx);
  OraclePredicate oracle = OraclePredicate::from_predicate(
      s.dim(), [](std::uint64_t x) { return (x * 2654435761ULL) % 7 == 0; });
  QuantumState o1 = apply_grover(s, oracle, 25, ctx);
  QuantumState o2 = apply_grover(s, oracle, 25, ctx);
  REQUIRE(o1.amp.size() == o2.amp.size());
  bool same = true;
  for (std::size_t i = 0; i < o1.amp.size(); ++i)
    same = same && o1.amp[i] == o2.amp[i];
  CHECK(same);
}
