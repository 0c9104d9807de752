// SPDX-License-Identifier: Apache-2.0
#include "qsp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qsp {
namespace {

double clamp_asin_arg(double v, const char* what, std::size_t k, bool* clamped,
                      std::vector<std::string>* notes) {
  if (v >= -1.0 && v <= 1.0) return v;
  if (clamped) *clamped = true;
  if (notes) {
    std::ostringstream msg;
    msg << what << " at step " << k + 1 << " clamped from " << v;
    notes->push_back(msg.str());
  }
  return std::clamp(v, -1.0, 1.0);
}

}  // namespace

std::vector<std::int64_t> select_oracles(std::span<const double> estimates, double threshold,
                                         std::int64_t inv_eps) {
  if (std::int64_t(estimates.size()) != inv_eps) {
    throw ComputeError("selection needs one estimate per oracle");
  }
  std::vector<std::int64_t> f;
  std::int64_t first = 0;
  for (std::int64_t j = 1; j <= inv_eps; ++j) {
    if (estimates[std::size_t(j - 1)] >= threshold) {
      first = j;
      break;
    }
  }
  if (first == 0) {
    throw ComputeError("no oracle count estimate reaches the selection threshold " +
                       std::to_string(threshold));
  }
  f.push_back(first);
  while (true) {
    const double prev = estimates[std::size_t(f.back() - 1)];
    std::int64_t next = 0;
    for (std::int64_t j = f.back() + 1; j < inv_eps; ++j) {
      if (estimates[std::size_t(j - 1)] > prev) {
        next = j;
        break;
      }
    }
    if (next == 0) break;
    f.push_back(next);
  }
  return f;
}

std::vector<double> step_targets(std::span<const std::int64_t> f, Recip epsilon, double eta,
                                 std::uint64_t N) {
  const std::int64_t inv = epsilon.inv;
  std::vector<double> delta(f.size());
  const double root = std::sqrt(eta * double(N));
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::int64_t fk = f[k];
    const std::int64_t fnext = k + 1 < f.size() ? f[k + 1] : inv;
    if (fk < 1 || fk > inv || fnext < fk) {
      throw ComputeError("selected oracle indices must be ascending within the bank");
    }
    delta[k] = double(fnext - fk) / (double(inv) * root);
  }
  return delta;
}

std::vector<StepPredict> predict_steps(std::span<const double> heights,
                                       std::span<const double> widths, double two_aN,
                                       std::vector<std::string>* notes) {
  if (heights.size() != widths.size()) {
    throw ComputeError("feature heights and widths must pair up");
  }
  const std::size_t T = heights.size();
  std::vector<StepPredict> out(T);
  // running moments over completed bands s <= k-1:
  //   s_prev = sum W_s H_s,  m0 = sum (W_s - W_{s-1}),
  //   m1 = sum (W_s - W_{s-1}) C_{s,k-1},  m2 = same with C^2,
  // where C_{s,k-1} = H_s + ... + H_{k-1}
  double s_prev = 0.0, m0 = 0.0, m1 = 0.0, m2 = 0.0, w_prev = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    const double W = widths[k];
    const double H = heights[k];
    if (!(W > 0.0) || W >= 0.5 * two_aN) {
      throw ComputeError("accepted-set width must lie in (0, half the register)");
    }
    if (W < w_prev) throw ComputeError("accepted-set widths must be non-decreasing");
    const double alpha_sq = (s_prev * s_prev + W * (1.0 - m2)) / (W * (two_aN - W));
    if (!(alpha_sq > 0.0)) {
      throw ComputeError("rotation amplitude is not positive; the plan inputs are inconsistent");
    }
    StepPredict& P = out[k];
    P.alpha = std::sqrt(alpha_sq);
    P.omega = std::acos(1.0 - 2.0 * W / two_aN);
    const double denom = P.alpha * std::sqrt(two_aN * W);
    const double s_fin = s_prev + W * H;
    P.gamma_ini = clamp_asin_arg(s_prev / denom, "gamma_ini", k, &P.clamped, notes);
    P.gamma_fin = clamp_asin_arg(s_fin / denom, "gamma_fin", k, &P.clamped, notes);
    P.tau = (std::asin(P.gamma_fin) - std::asin(P.gamma_ini)) / P.omega;
    // advance the moments: every completed C gains H, and band k opens with
    // weight W - w_prev and C_{k,k} = H
    const double band = W - w_prev;
    m2 += 2.0 * H * m1 + H * H * m0 + band * H * H;
    m1 += H * m0 + band * H;
    m0 += band;
    s_prev = s_fin;
    w_prev = W;
  }
  return out;
}

RealizedEvolution evolve_features(std::span<const std::int64_t> t,
                                  std::span<const double> widths, double two_aN) {
  if (t.size() != widths.size()) throw ComputeError("times and widths must pair up");
  RealizedEvolution ev;
  ev.h.reserve(t.size());
  ev.background.reserve(t.size());
  ev.solution_avg.reserve(t.size());
  double B = 1.0 / std::sqrt(two_aN);  // flat initial superposition
  double s_run = 0.0;                  // sum of W_s h_s over completed steps
  double w_prev = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double W = widths[k];
    if (!(W > 0.0) || W >= 0.5 * two_aN || W < w_prev) {
      throw ComputeError("accepted-set widths must be non-decreasing and below half the register");
    }
    if (t[k] < 0) throw ComputeError("step counts must be non-negative");
    const double g_bar = s_run / W + B;
    const double b_bar = B;
    const double root = std::sqrt(W / (two_aN - W));
    const double alpha = std::hypot(b_bar, g_bar * root);
    const double phase = std::atan2(g_bar * root, b_bar);
    const double omega = std::acos(1.0 - 2.0 * W / two_aN);
    const double theta = omega * double(t[k]) + phase;
    const double g_fin = alpha * std::sin(theta) / root;
    const double b_fin = alpha * std::cos(theta);
    const double h = (g_fin - b_fin) - (g_bar - b_bar);
    ev.h.push_back(h);
    ev.background.push_back(b_fin);
    ev.solution_avg.push_back(g_fin);
    B = b_fin;
    s_run += W * h;
    w_prev = W;
  }
  return ev;
}

double background_level(std::span<const double> heights, std::span<const double> widths,
                        double two_aN) {
  if (heights.size() != widths.size()) {
    throw ComputeError("feature heights and widths must pair up");
  }
  const std::size_t T = heights.size();
  double s = 0.0;
  for (std::size_t k = 0; k < T; ++k) s += widths[k] * heights[k];
  // sum over bands of (W_s - W_{s-1}) C_{s,T}^2 with C the suffix sums of H
  double q = 0.0, suffix = 0.0;
  std::vector<double> c(T);
  for (std::size_t k = T; k-- > 0;) {
    suffix += heights[k];
    c[k] = suffix;
  }
  double w_prev = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    q += (widths[k] - w_prev) * c[k] * c[k];
    w_prev = widths[k];
  }
  const double lin = s / two_aN;
  const double disc = lin * lin + (1.0 - q) / two_aN;
  if (disc < 0.0) throw ComputeError("normalization quadratic has no real root");
  return -lin + std::sqrt(disc);
}

Schedule build_schedule(const OracleBank& bank, std::span<const CountEstimate> estimates,
                        const AccuracyParams& params, const TargetSpec& spec) {
  if (std::int64_t(estimates.size()) != params.epsilon.inv ||
      bank.inv_eps() != params.epsilon.inv || bank.domain() != spec.N) {
    throw ComputeError("schedule inputs disagree about the oracle bank shape");
  }
  Schedule sch;
  sch.inv_eps = params.epsilon.inv;
  sch.a = params.a;
  sch.eta = spec.eta;
  sch.N = spec.N;

  std::vector<double> n_est(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) n_est[i] = estimates[i].estimate;
  sch.f = select_oracles(n_est, params.eta_g * double(spec.N), sch.inv_eps);
  sch.delta = step_targets(sch.f, params.epsilon, spec.eta, spec.N);
  sch.n_tilde.resize(sch.f.size());
  for (std::size_t k = 0; k < sch.f.size(); ++k) {
    sch.n_tilde[k] = n_est[std::size_t(sch.f[k] - 1)];
  }
  sch.predicted = predict_steps(sch.delta, sch.n_tilde, sch.two_a_n(), &sch.notes);
  sch.t.resize(sch.predicted.size());
  for (std::size_t k = 0; k < sch.predicted.size(); ++k) {
    const double rounded = std::floor(0.5 + sch.predicted[k].tau);
    if (rounded < 0.0) throw ComputeError("a negative step count escaped the plan");
    sch.t[k] = std::int64_t(rounded);
  }
  return sch;
}

}  // namespace qsp
