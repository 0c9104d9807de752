// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsp {

using cplx = std::complex<double>;

// Scenario/usage problems: bad files, violated preconditions, unknown keys.
// CLI maps these to exit code 2.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Resource limits (state too large, grid too coarse, retry budget exhausted).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Infeasible numeric construction (negative discriminant, empty schedule).
struct ComputeError : std::runtime_error {
  explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExecPolicy { Serial, Parallel };

// Shared execution context: kernel policy, resource caps, and the global
// operation counters every pipeline stage increments.
struct ExecContext {
  ExecPolicy policy = ExecPolicy::Parallel;
  int max_qubits = 26;  // uniform_state rejects L above this
  std::uint64_t prep_oracle_calls = 0;
  std::uint64_t counting_oracle_calls = 0;
  std::uint64_t phase_ops = 0;
  std::vector<std::string> notes;  // clamp events and other anomalies
};

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with an explicit output-to-double mapping so draws are
// reproducible independent of the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::uint64_t bits() { return eng_(); }

  // child generator with a seed derived from this one's stream position
  Rng child(std::uint64_t salt) {
    std::uint64_t s = eng_() ^ salt;
    return Rng(splitmix64(s));
  }

 private:
  std::mt19937_64 eng_;
};

// Reciprocal of a positive integer; the schema demands several parameters of
// the exact form 1/k.
struct Recip {
  std::int64_t inv = 0;
  double value() const { return 1.0 / static_cast<double>(inv); }
  std::string str() const { return "1/" + std::to_string(inv); }
};

}  // namespace qsp
