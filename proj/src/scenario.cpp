// SPDX-License-Identifier: Apache-2.0
#include "qsp/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "qsp/kernels.hpp"

namespace qsp {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ScenarioError("scenario " + origin + ": " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& origin, const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(origin, "unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double get_double(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_number()) fail(origin, "\"" + key + "\" must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(origin, "\"" + key + "\" must be finite");
  return x;
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(origin, "\"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

// Accepts "1/k" strings or a plain number that is the reciprocal of an integer.
Recip parse_recip(const json& v, const std::string& key, const std::string& origin) {
  std::int64_t inv = 0;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::istringstream iss(s);
    char slash = 0;
    std::int64_t one = 0;
    if (!(iss >> one >> slash >> inv) || one != 1 || slash != '/' || !iss.eof() || inv < 1) {
      fail(origin, "\"" + key + "\" must look like \"1/k\" with integer k >= 1, got \"" + s + "\"");
    }
  } else if (v.is_number()) {
    double x = v.get<double>();
    if (!(x > 0.0)) fail(origin, "\"" + key + "\" must be positive");
    inv = std::llround(1.0 / x);
    if (inv < 1 || std::abs(double(inv) * x - 1.0) > 1e-9) {
      fail(origin, "\"" + key + "\" must be the reciprocal of an integer");
    }
  } else {
    fail(origin, "\"" + key + "\" must be a \"1/k\" string or a number");
  }
  return Recip{inv};
}

CountingMode parse_counting_mode(const json& v, const std::string& origin) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "exact") return CountingMode::Exact;
    if (s == "sampled") return CountingMode::Sampled;
  }
  fail(origin, "\"counting_mode\" must be \"exact\" or \"sampled\"");
}

struct FamilyResult {
  std::function<double(std::uint64_t)> p;
  std::string desc;
};

FamilyResult build_family(const std::string& family, const json& params,
                          std::uint64_t N, const std::string& origin) {
  std::ostringstream desc;
  desc << family;
  if (family == "uniform") {
    check_keys(params, {}, origin, "family_params");
    const double val = 1.0 / double(N);
    return {[val](std::uint64_t) { return val; }, desc.str()};
  }
  if (family == "two_level") {
    check_keys(params, {"high_fraction", "low_to_high_ratio"}, origin, "family_params");
    const double w = get_double(params, "high_fraction", origin);
    const double r = get_double(params, "low_to_high_ratio", origin);
    if (!(w > 0.0 && w <= 1.0)) fail(origin, "\"high_fraction\" must be in (0, 1]");
    if (!(r >= 0.0 && r <= 1.0)) fail(origin, "\"low_to_high_ratio\" must be in [0, 1]");
    const std::uint64_t hi = std::uint64_t(std::llround(w * double(N)));
    if (hi < 1 || hi > N) fail(origin, "\"high_fraction\" selects no valid block");
    const double p_hi = 1.0 / (double(hi) + double(N - hi) * r);
    const double p_lo = r * p_hi;
    desc << "(high=" << hi << ", ratio=" << r << ")";
    return {[hi, p_hi, p_lo](std::uint64_t x) { return x < hi ? p_hi : p_lo; }, desc.str()};
  }
  if (family == "binomial") {
    check_keys(params, {"q"}, origin, "family_params");
    const double q = params.contains("q") ? get_double(params, "q", origin) : 0.5;
    if (!(q > 0.0 && q < 1.0)) fail(origin, "\"q\" must be in (0, 1)");
    const double n_tr = double(N - 1);
    const double lq = std::log(q), l1q = std::log1p(-q);
    auto p = [n_tr, lq, l1q](std::uint64_t x) {
      const double k = double(x);
      return std::exp(std::lgamma(n_tr + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n_tr - k + 1.0) + k * lq + (n_tr - k) * l1q);
    };
    desc << "(trials=" << N - 1 << ", q=" << q << ")";
    return {p, desc.str()};
  }
  if (family == "truncated_gaussian") {
    check_keys(params, {"sigma_over_n", "center_over_n"}, origin, "family_params");
    const double s = get_double(params, "sigma_over_n", origin);
    const double c =
        params.contains("center_over_n") ? get_double(params, "center_over_n", origin) : 0.5;
    if (!(s > 0.0 && s <= 10.0)) fail(origin, "\"sigma_over_n\" must be in (0, 10]");
    if (!(c >= 0.0 && c <= 1.0)) fail(origin, "\"center_over_n\" must be in [0, 1]");
    const double sigma = s * double(N);
    const double center = c * double(N) - 0.5;
    auto g = [sigma, center](std::uint64_t x) {
      const double d = (double(x) - center) / sigma;
      return std::exp(-0.5 * d * d);
    };
    double z = 0.0, comp = 0.0;  // Neumaier
    for (std::uint64_t x = 0; x < N; ++x) {
      const double t = z + g(x);
      comp += std::abs(z) >= std::abs(g(x)) ? (z - t) + g(x) : (g(x) - t) + z;
      z = t;
    }
    z += comp;
    desc << "(sigma=" << sigma << ", center=" << center << ")";
    return {[g, z](std::uint64_t x) { return g(x) / z; }, desc.str()};
  }
  fail(origin, "unknown family \"" + family + "\"");
}

struct PhiResult {
  std::function<double(std::uint64_t)> phi;
  std::string desc;
};

PhiResult build_phi_family(const std::string& family, const json& params,
                           std::uint64_t N, std::int64_t inv_eps_prime,
                           const std::string& origin) {
  std::ostringstream desc;
  desc << family;
  if (family == "zero") {
    check_keys(params, {}, origin, "phi_params");
    return {[](std::uint64_t) { return 0.0; }, desc.str()};
  }
  if (family == "lattice_ramp" || family == "jittered_ramp") {
    std::set<std::string> allowed = {"step"};
    if (family == "jittered_ramp") allowed.insert("jitter");
    check_keys(params, allowed, origin, "phi_params");
    const std::int64_t step = params.contains("step") ? get_int(params, "step", origin) : 1;
    if (step < 0) fail(origin, "\"step\" must be >= 0");
    const double jitter = (family == "jittered_ramp" && params.contains("jitter"))
                              ? get_double(params, "jitter", origin)
                              : (family == "jittered_ramp" ? 0.004 : 0.0);
    if (!(jitter >= 0.0 && jitter < 0.5)) fail(origin, "\"jitter\" must be in [0, 0.5)");
    const std::uint64_t K = std::uint64_t(inv_eps_prime);
    const double nd = double(N);
    auto phi = [K, step, jitter, nd](std::uint64_t x) {
      // correctly-rounded division keeps lattice points exactly on the rungs
      double v = double(((x % K) * std::uint64_t(step)) % K) / double(K);
      if (jitter != 0.0) {
        v += jitter * std::sin(2.0 * std::numbers::pi * double(x) / nd);
        v -= std::floor(v);
      }
      return v;
    };
    desc << "(step=" << step;
    if (jitter != 0.0) desc << ", jitter=" << jitter;
    desc << ")";
    return {phi, desc.str()};
  }
  fail(origin, "unknown phi_family \"" + family + "\"");
}

std::vector<double> read_table(const json& v, const std::string& key, const std::string& origin) {
  if (!v.is_array() || v.empty()) fail(origin, "\"" + key + "\" must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) fail(origin, "\"" + key + "\" entries must be numbers");
    const double x = e.get<double>();
    if (!std::isfinite(x)) fail(origin, "\"" + key + "\" entries must be finite");
    out.push_back(x);
  }
  return out;
}

}  // namespace

std::string to_string(CountingMode m) {
  return m == CountingMode::Exact ? "exact" : "sampled";
}

Recip choose_epsilon(double lambda, double eta, std::int64_t max_inv) {
  const double bound = lambda * eta / 3.0;
  if (!(bound > 0.0)) throw ScenarioError("choose_epsilon: lambda*eta must be positive");
  auto small_enough = [bound](std::int64_t q) { return 1.0 / double(q) < bound; };
  std::int64_t q = std::max<std::int64_t>(2, std::int64_t(std::floor(3.0 / (lambda * eta))) + 1);
  while (q > 2 && small_enough(q - 1)) --q;
  while (q <= max_inv && !small_enough(q)) ++q;
  if (q > max_inv) {
    throw ScenarioError("choose_epsilon: 1/epsilon exceeds the limit " + std::to_string(max_inv) +
                        " (lambda*eta = " + std::to_string(lambda * eta) + " is too small)");
  }
  return Recip{q};
}

AccuracyParams worst_case_params(Recip epsilon, double nu) {
  if (epsilon.inv < 2) throw ScenarioError("epsilon must be at most 1/2");
  const double e = epsilon.value();
  AccuracyParams P;
  P.epsilon = epsilon;
  P.eta_c = e * e * e * e * e / 54.0;
  P.eta_g = 0.99 * e * e;
  P.a = int(std::ceil(std::log2(P.eta_g / P.eta_c) - 3.0));
  P.m = int(std::ceil(std::log2(1.0 / P.eta_c)));
  P.a_c = nu > 0.0 ? P.m + int(std::ceil(std::log2(2.0 + 1.0 / (2.0 * nu)))) : 0;
  const double two_a = std::ldexp(1.0, P.a);
  if (P.a < 3 || !(two_a > 6.0 / (e * e)) || !(two_a <= P.eta_g / (4.0 * P.eta_c))) {
    throw ComputeError("derived aux-register size failed its own consequence checks");
  }
  return P;
}

AccuracyParams resolve_params(const TargetSpec& spec) {
  const Recip eps = spec.overrides.epsilon ? *spec.overrides.epsilon
                                           : choose_epsilon(spec.lambda, spec.eta);
  const CountingMode mode = spec.overrides.counting_mode.value_or(CountingMode::Sampled);
  const double nu = mode == CountingMode::Sampled ? spec.nu : 0.0;
  AccuracyParams P = worst_case_params(eps, nu);
  P.counting_mode = mode;
  P.nu_effective = nu;
  if (spec.overrides.eta_c) {
    P.eta_c = *spec.overrides.eta_c;
    P.m = int(std::ceil(std::log2(1.0 / P.eta_c)));
    P.a_c = nu > 0.0 ? P.m + int(std::ceil(std::log2(2.0 + 1.0 / (2.0 * nu)))) : 0;
    P.worst_case = false;
  }
  if (spec.overrides.eta_g) {
    P.eta_g = *spec.overrides.eta_g;
    P.worst_case = false;
  }
  if (spec.overrides.a) {
    P.a = *spec.overrides.a;
    P.worst_case = false;
  }
  if (!(P.eta_c > 0.0 && P.eta_c < P.eta_g && P.eta_g < 0.5)) {
    throw ScenarioError("scenario " + spec.name +
                        ": accuracy overrides must satisfy 0 < eta_c < eta_g < 1/2");
  }
  if (P.a < 1 || P.a > 30) {
    throw ScenarioError("scenario " + spec.name + ": aux-register override a=" +
                        std::to_string(P.a) + " is outside [1, 30]");
  }
  return P;
}

TargetSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario " + path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str(), path);
}

TargetSpec load_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(origin, "top level must be a JSON object");
  check_keys(j,
             {"name", "N", "family", "family_params", "table", "renormalize", "phi_family",
              "phi_params", "phi_table", "eta", "lambda", "nu", "epsilon_prime", "overrides",
              "seed"},
             origin, "the scenario");

  TargetSpec spec;
  spec.raw_json = j.dump();
  spec.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>()
                                                             : origin;

  // --- probability map -------------------------------------------------
  const bool has_family = j.contains("family");
  const bool has_table = j.contains("table");
  if (has_family == has_table) fail(origin, "exactly one of \"family\" or \"table\" is required");
  if (j.contains("renormalize") && !has_table) {
    fail(origin, "\"renormalize\" only applies to tabulated probabilities");
  }

  std::vector<double> table;
  if (has_table) {
    table = read_table(j.at("table"), "table", origin);
    for (std::size_t x = 0; x < table.size(); ++x) {
      if (table[x] < 0.0) {
        fail(origin, "p(" + std::to_string(x) + ") = " + std::to_string(table[x]) +
                         " is negative");
      }
    }
    const std::uint64_t raw = table.size();
    std::uint64_t N = std::max<std::uint64_t>(2, std::bit_ceil(raw));
    if (j.contains("N")) {
      const std::int64_t n_req = get_int(j, "N", origin);
      if (n_req < std::int64_t(raw) || !std::has_single_bit(std::uint64_t(n_req))) {
        fail(origin, "\"N\" must be a power of two covering the table length");
      }
      N = std::uint64_t(n_req);
    }
    table.resize(N, 0.0);
    double sum = 0.0;
    for (double v : table) sum += v;
    const bool renorm = j.contains("renormalize") && j.at("renormalize").is_boolean() &&
                        j.at("renormalize").get<bool>();
    if (std::abs(sum - 1.0) > 1e-9) {
      if (!renorm) {
        fail(origin, "tabulated probabilities sum to " + std::to_string(sum) +
                         ", not 1 (set \"renormalize\": true to rescale)");
      }
      if (!(sum > 0.0)) fail(origin, "tabulated probabilities must have positive mass");
      for (double& v : table) v /= sum;
    }
    spec.N = N;
    spec.family_desc = "table(" + std::to_string(raw) + " entries)";
    auto shared = std::make_shared<std::vector<double>>(std::move(table));
    spec.p = [shared](std::uint64_t x) { return (*shared)[x]; };
  } else {
    if (!j.contains("N")) fail(origin, "\"N\" is required with a named family");
    const std::int64_t n_req = get_int(j, "N", origin);
    if (n_req < 2 || !std::has_single_bit(std::uint64_t(n_req))) {
      fail(origin, "\"N\" must be a power of two >= 2");
    }
    spec.N = std::uint64_t(n_req);
    if (!j.at("family").is_string()) fail(origin, "\"family\" must be a string");
    const json params = j.contains("family_params") ? j.at("family_params") : json::object();
    if (!params.is_object()) fail(origin, "\"family_params\" must be an object");
    FamilyResult fam = build_family(j.at("family").get<std::string>(), params, spec.N, origin);
    spec.p = std::move(fam.p);
    spec.family_desc = std::move(fam.desc);
  }
  if (spec.N > (1ULL << 30)) fail(origin, "\"N\" is too large");
  spec.n_qubits = std::countr_zero(spec.N);

  // --- scalar parameters ------------------------------------------------
  for (const char* req : {"eta", "lambda"}) {
    if (!j.contains(req)) fail(origin, std::string("\"") + req + "\" is required");
  }
  spec.eta = get_double(j, "eta", origin);
  spec.lambda = get_double(j, "lambda", origin);
  if (!(spec.eta > 0.0 && spec.eta <= 1.0)) fail(origin, "\"eta\" must be in (0, 1]");
  if (!(spec.lambda > 0.0 && spec.lambda <= 1.0)) fail(origin, "\"lambda\" must be in (0, 1]");
  spec.nu = j.contains("nu") ? get_double(j, "nu", origin) : 0.1;
  if (!(spec.nu > 0.0 && spec.nu < 1.0)) fail(origin, "\"nu\" must be in (0, 1)");
  if (j.contains("epsilon_prime")) {
    spec.epsilon_prime = parse_recip(j.at("epsilon_prime"), "epsilon_prime", origin);
    if (spec.epsilon_prime.inv < 2) fail(origin, "\"epsilon_prime\" must be at most 1/2");
  }
  if (j.contains("seed")) {
    const std::int64_t s = get_int(j, "seed", origin);
    if (s < 0) fail(origin, "\"seed\" must be non-negative");
    spec.seed = std::uint64_t(s);
  }

  // --- phase map ---------------------------------------------------------
  if (j.contains("phi_family") && j.contains("phi_table")) {
    fail(origin, "at most one of \"phi_family\" or \"phi_table\" is allowed");
  }
  if (j.contains("phi_table")) {
    std::vector<double> phis = read_table(j.at("phi_table"), "phi_table", origin);
    if (phis.size() > spec.N) fail(origin, "\"phi_table\" is longer than N");
    phis.resize(spec.N, 0.0);
    for (std::size_t x = 0; x < phis.size(); ++x) {
      if (!(phis[x] >= 0.0 && phis[x] < 1.0)) {
        fail(origin, "phi(" + std::to_string(x) + ") = " + std::to_string(phis[x]) +
                         " is outside [0, 1)");
      }
    }
    auto shared = std::make_shared<std::vector<double>>(std::move(phis));
    spec.phi = [shared](std::uint64_t x) { return (*shared)[x]; };
    spec.phi_desc = "table";
  } else {
    std::string fam = "zero";
    if (j.contains("phi_family")) {
      if (!j.at("phi_family").is_string()) fail(origin, "\"phi_family\" must be a string");
      fam = j.at("phi_family").get<std::string>();
    }
    const json params = j.contains("phi_params") ? j.at("phi_params") : json::object();
    if (!params.is_object()) fail(origin, "\"phi_params\" must be an object");
    PhiResult pr = build_phi_family(fam, params, spec.N, spec.epsilon_prime.inv, origin);
    spec.phi = std::move(pr.phi);
    spec.phi_desc = std::move(pr.desc);
  }

  // --- overrides ----------------------------------------------------------
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    if (!o.is_object()) fail(origin, "\"overrides\" must be an object");
    check_keys(o, {"epsilon", "eta_c", "eta_g", "a", "counting_mode"}, origin, "overrides");
    if (o.contains("epsilon")) {
      Recip eps = parse_recip(o.at("epsilon"), "overrides.epsilon", origin);
      if (eps.inv < 2 || eps.inv > 1000000) {
        fail(origin, "\"overrides.epsilon\" must be between 1/1000000 and 1/2");
      }
      spec.overrides.epsilon = eps;
    }
    if (o.contains("eta_c")) spec.overrides.eta_c = get_double(o, "eta_c", origin);
    if (o.contains("eta_g")) spec.overrides.eta_g = get_double(o, "eta_g", origin);
    if (o.contains("a")) spec.overrides.a = int(get_int(o, "a", origin));
    if (o.contains("counting_mode")) {
      spec.overrides.counting_mode = parse_counting_mode(o.at("counting_mode"), origin);
    }
  }

  // --- global invariants: normalization, then the amplitude ceiling ------
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t x = 0; x < spec.N; ++x) {
    const double v = spec.p(x);
    if (!(std::isfinite(v) && v >= 0.0)) {
      fail(origin, "p(" + std::to_string(x) + ") must be finite and non-negative");
    }
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  sum += comp;
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(origin, "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  const double cap = 1.0 / (spec.eta * double(spec.N)) * (1.0 + 1e-12);
  for (std::uint64_t x = 0; x < spec.N; ++x) {
    if (spec.p(x) > cap) {
      std::ostringstream msg;
      msg << "p(" << x << ") = " << spec.p(x) << " exceeds 1/(eta*N) = "
          << 1.0 / (spec.eta * double(spec.N)) << "; lower eta or flatten the target";
      fail(origin, msg.str());
    }
  }
  return spec;
}

namespace {

QuantumState build_target(const TargetSpec& spec, bool with_phase, ExecPolicy policy) {
  QuantumState st;
  st.L = spec.n_qubits;
  st.amp.resize(spec.N);
  (void)policy;  // per-element map, safe to parallelize over disjoint indices
  const std::int64_t n = std::int64_t(spec.N);
#pragma omp parallel for if (policy == ExecPolicy::Parallel && n >= 4096)
  for (std::int64_t x = 0; x < n; ++x) {
    const double mag = std::sqrt(spec.p(std::uint64_t(x)));
    if (with_phase) {
      const double ang = 2.0 * std::numbers::pi * spec.phi(std::uint64_t(x));
      st.amp[std::size_t(x)] = std::polar(mag, ang);
    } else {
      st.amp[std::size_t(x)] = mag;
    }
  }
  return st;
}

}  // namespace

QuantumState target_state(const TargetSpec& spec, ExecPolicy policy) {
  return build_target(spec, true, policy);
}

QuantumState magnitude_target(const TargetSpec& spec, ExecPolicy policy) {
  return build_target(spec, false, policy);
}

}  // namespace qsp
