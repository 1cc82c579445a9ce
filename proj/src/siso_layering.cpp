// SPDX-License-Identifier: Apache-2.0

// Discrete superposition for one Rayleigh link. With residual powers
// s_1 = P > s_2 > ... > s_N > s_{N+1} = 0, layer i carries
// R_i = log((1 + eta_i s_i) / (1 + eta_i s_{i+1})) and decodes iff the
// fading power is at least eta_i. The objective sum_i R_i e^{-eta_i} is
// maximized by block-coordinate ascent: each eta_i is the unique root of
// g_i'(eta) = g_i(eta), and each interior s_i has a closed-form maximizer.

#include <algorithm>
#include <cmath>

#include "bmdf/errors.hpp"
#include "bmdf/lambert_w.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/two_layer.hpp"

namespace bmdf {
namespace {

constexpr int kMaxSweeps = 200000;

double LayerRate(double eta, double hi, double lo) { return std::log1p(eta * hi) - std::log1p(eta * lo); }

// argmax_eta e^{-eta} log((1 + eta hi) / (1 + eta lo)) for hi > lo >= 0.
double BestThreshold(double hi, double lo) {
  if (lo == 0.0) return std::expm1(lambert_w0(hi)) / hi;
  const auto g = [&](double eta) {
    return hi / (1.0 + eta * hi) - lo / (1.0 + eta * lo) - LayerRate(eta, hi, lo);
  };
  double upper = 1.0;
  while (g(upper) > 0.0) upper *= 2.0;
  return bisect_root(g, 0.0, upper, 1e-16);
}

// argmax over s in [lo, hi] of e^{-eta_hi} log(1 + eta_hi s) - e^{-eta_lo} log(1 + eta_lo s),
// eta_lo <= eta_hi being the thresholds of the layers above and below s.
double BestResidual(double eta_lo, double eta_hi, double lo, double hi, double current) {
  if (!(eta_hi > eta_lo)) return std::clamp(current, lo, hi);
  const double a = std::exp(-eta_hi) * eta_hi;
  const double b = std::exp(-eta_lo) * eta_lo;
  if (a <= b) return lo;
  const double s = (b - a) / (eta_hi * eta_lo * (std::exp(-eta_hi) - std::exp(-eta_lo)));
  return std::clamp(s, lo, hi);
}

struct State {
  std::vector<double> eta;
  std::vector<double> s;  // size n + 1, s[n] = 0
};

double Objective(const State& st) {
  double sum = 0.0;
  for (std::size_t i = 0; i < st.eta.size(); ++i) {
    sum += std::exp(-st.eta[i]) * LayerRate(st.eta[i], st.s[i], st.s[i + 1]);
  }
  return sum;
}

void UpdateThresholds(State& st) {
  const std::size_t n = st.eta.size();
  for (std::size_t i = 0; i < n; ++i) {
    double eta = st.s[i] > st.s[i + 1] ? BestThreshold(st.s[i], st.s[i + 1]) : st.eta[i];
    if (i > 0) eta = std::max(eta, st.eta[i - 1]);
    if (i + 1 < n) eta = std::min(eta, st.eta[i + 1]);
    st.eta[i] = eta;
  }
}

void UpdateResiduals(State& st) {
  for (std::size_t i = 1; i < st.eta.size(); ++i) {
    st.s[i] = BestResidual(st.eta[i - 1], st.eta[i], st.s[i + 1], st.s[i - 1], st.s[i]);
  }
}

State Ascend(State st) {
  double value = Objective(st);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const State before = st;
    UpdateThresholds(st);
    UpdateResiduals(st);
    const double next = Objective(st);
    double moved = 0.0;
    for (std::size_t i = 0; i < st.eta.size(); ++i) {
      moved = std::max(moved, std::abs(st.eta[i] - before.eta[i]) / std::max(1.0, st.eta[i]));
      moved = std::max(moved, std::abs(st.s[i] - before.s[i]) / st.s[0]);
    }
    if (next < value) {
      st = before;
      break;
    }
    value = next;
    if (moved < 1e-13) break;
  }
  return st;
}

// Residuals geometrically spaced from P with the given ratio; thresholds
// seeded at the single-layer optimum and pushed apart to stay ordered.
State Seed(double p, int n, double ratio) {
  State st;
  st.s.assign(n + 1, 0.0);
  st.s[0] = p;
  for (int i = 1; i < n; ++i) st.s[i] = st.s[i - 1] * ratio;
  st.eta.assign(n, 0.0);
  for (int i = 0; i < n; ++i) st.eta[i] = BestThreshold(st.s[i], st.s[i + 1]);
  for (int i = 1; i < n; ++i) st.eta[i] = std::max(st.eta[i], st.eta[i - 1]);
  return st;
}

}  // namespace

double siso_layering_objective(const std::vector<double>& thresholds, const std::vector<double>& residual) {
  if (thresholds.size() != residual.size() || thresholds.empty()) {
    throw InvalidSpec("siso_layering_objective: thresholds and residual powers must match in size");
  }
  State st{thresholds, residual};
  st.s.push_back(0.0);
  return Objective(st);
}

SisoLayering optimize_siso_layering(double p_s, int n_layers) {
  if (!(p_s > 0.0) || !std::isfinite(p_s)) throw DomainError("optimize_siso_layering: p_s must be finite and > 0");
  if (n_layers < 1) throw DomainError("optimize_siso_layering: n_layers must be >= 1");
  const int n = n_layers;

  State best;
  double best_value = -1.0;
  if (n == 1) {
    best.s = {p_s, 0.0};
    best.eta = {q_min_single(p_s)};
    best_value = Objective(best);
  } else {
    for (const double ratio : {0.5, 0.2, 0.1, 0.03, 0.01, 1e-3}) {
      const State st = Ascend(Seed(p_s, n, ratio));
      const double v = Objective(st);
      if (v > best_value) {
        best_value = v;
        best = st;
      }
    }
  }

  SisoLayering out;
  out.n_layers = n;
  out.thresholds = best.eta;
  out.objective = best_value;
  double used = 0.0;
  for (int i = 0; i < n; ++i) {
    out.rates.push_back(LayerRate(best.eta[i], best.s[i], best.s[i + 1]));
    const double f = i + 1 < n ? (best.s[i] - best.s[i + 1]) / p_s : 1.0 - used;
    out.splits.push_back(f);
    used += f;
  }
  return out;
}

double q_min_layers(double p_s, const SisoLayering& layering) {
  if (layering.thresholds.empty()) throw DomainError("q_min_layers: layering has no thresholds");
  if (!(p_s > 0.0)) throw DomainError("q_min_layers: p_s must be > 0");
  return layering.thresholds.back();
}

}  // namespace bmdf
