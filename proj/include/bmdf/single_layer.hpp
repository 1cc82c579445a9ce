// SPDX-License-Identifier: Apache-2.0

// Single-layer block-Markov decode-and-forward: outage/success
// probabilities, correlation-region classification, throughput optimization
// and the collocation-gain thresholds for reaching MISO rates.

#pragma once

#include <optional>
#include <vector>

#include "bmdf/channel.hpp"

namespace bmdf {

/// Success probability of a single Rayleigh link at total power p:
/// exp(-(e^rate - 1) / p).
double success_prob_su(double rate, double p);

/// P(x E1 + y E2 > c) for iid unit exponentials E1, E2 (x, y > 0).
/// Continuous across x == y, where it equals (1 + c/x) e^{-c/x}.
double pair_tail(double x, double y, double c);

/// d/dc of pair_tail(x, y, c).
double pair_tail_dc(double x, double y, double c);

/// Success probability of the uncorrelated 2x1 MISO link at `rate`.
double success_prob_pair(double rate, double x, double y);

/// Crossing point x0 = -2 W_{-1}(-e^{-1/2} / 2) - 1 at which the equal-power
/// MISO and the single-user link (total power) succeed equally often.
double crossover_x0();

/// gamma_0 = x0 / 2, the lower edge of the ambiguous correlation region.
double gamma0();

enum class RhoRegionKind { ZeroOptimal, Ambiguous, MaxOptimal };

const char* to_string(RhoRegionKind k);

struct RhoRegion {
  RhoRegionKind kind = RhoRegionKind::ZeroOptimal;
  double r_low = 0.0;
  double r_high = 0.0;
};

/// Classifies `rate` against [log(1 + gamma0 P), log(1 + gamma P)] with
/// P = p_s + p_r. `gamma` must be >= gamma0 (1.5 for equal powers). With
/// `unbounded_q` the ambiguous band collapses onto log(1 + gamma0 P).
RhoRegion classify_rho_region(double rate, const ChannelParams& params, double gamma = 1.5,
                              bool unbounded_q = false);

/// Power re-allocation equivalent to transmitting at the maximal feasible
/// correlation: p0 + p0_bar = P, p0 * p0_bar = p_r (e^rate - 1) / q.
struct CorrelatedAllocation {
  double p0 = 0.0;
  double p0_bar = 0.0;
  double skew_delta = 0.0;
};

/// Throws InfeasibleRate if e^rate - 1 > p_s q, i.e. the relay cannot decode
/// `rate` at any correlation.
CorrelatedAllocation correlated_allocation(double rate, const ChannelParams& params);

/// rho_max^2 = 1 - (e^rate - 1) / (p_s q); throws InfeasibleRate if negative.
double rho_max(double rate, const ChannelParams& params);

enum class RhoMode { RhoZero, RhoMax };

/// Average throughput rate * P(success). RhoZero is zero above the relay's
/// decodable rate log(1 + p_s q); RhoMax throws InfeasibleRate there.
double throughput(double rate, const ChannelParams& params, RhoMode mode);

/// Derivative in `rate` of rate * pair_tail(x, y, e^rate - 1).
double miso_throughput_derivative(double rate, double x, double y);

struct RateOptimum {
  double rate = 0.0;
  double value = 0.0;
};

/// Throughput-maximizing rate on [1e-6, min(log(1 + 1e3 P), log(1 + p_s q))].
/// Golden-section search; for RhoZero the stationary point is then polished
/// by bisection on the analytic derivative.
RateOptimum maximize_throughput(const ChannelParams& params, RhoMode mode);

/// Rate maximizing rate * success_prob_su(rate, p_s): W(p_s).
double oblivious_su_rate(double p_s);

/// Throughput of the oblivious single-user rate without the relay.
double direct_throughput(double p_s);

/// Throughput of the oblivious single-user rate W(p_s) under
/// block-Markov DF at rho = 0.
double oblivious_bm_throughput(const ChannelParams& params);

/// Minimal collocation gain for which W(p_s) is decodable at the relay:
/// (e^{W(p_s)} - 1) / p_s = 1/W(p_s) - 1/p_s.
double q_min_single(double p_s);

/// Smallest p_s beyond which the oblivious MISO rate is reachable for a
/// collocation gain q < 1; 0 for q >= 1.
double p_s_star(double q);

/// Source power at which the equal-power rho = 0 throughput is stationary
/// at `rate`; strictly increasing in rate.
double stationary_source_power(double rate);

/// Left side of the throughput-slope inequality at R0 = log(1 + P):
/// (p_s e^{-p_r/p_s} - p_r e^{-p_s/p_r}) / (e^{-p_r/p_s} - e^{-p_s/p_r}),
/// continuously extended by 3 p_s / 2 at p_s == p_r.
double ratio_bound_lhs(double p_s, double p_r);

/// Correlated success probability at rate log(1 + alpha P) normalised by the
/// power skew parameter s (s = q for equal powers).
double k_alpha(double alpha, double s);

struct AlphaCheck {
  double alpha = 0.0;
  double alpha_k_alpha = 0.0;
  double k1 = 0.0;
  bool pass = false;
};

struct Conjecture1Audit {
  bool r0_decodable = false;
  double r0 = 0.0;
  double derivative_at_r0 = 0.0;
  bool derivative_negative = false;
  double slope_lhs = 0.0;        // ratio_bound_lhs(p_s, p_r)
  double slope_rhs = 0.0;        // log(1 + P)(1 + P)
  bool slope_inequality = false;
  bool sum_power_bound = true;   // lhs < p_s + p_r, checked when p_s > p_r
  double s = 0.0;
  std::vector<AlphaCheck> alpha_checks;
  std::size_t alphas_skipped = 0;
  bool pass = false;
};

/// Numeric audit of the rho = 0 throughput-optimality argument at `params`.
Conjecture1Audit audit_conjecture1(const ChannelParams& params, const std::vector<double>& alpha_grid);

/// Sign changes of the rho = 0 throughput derivative on a log-spaced grid of
/// `points` rates spanning (0, log(1 + 1e3 P)]; exact zeros are skipped.
int count_derivative_sign_changes(const ChannelParams& params, int points = 2000);

/// True iff the rho = 0 throughput derivative changes sign exactly once.
bool unimodality_check(const ChannelParams& params);

/// First rate on a `step` grid where rho_max beats rho = 0, if any.
std::optional<double> first_rhomax_preferred_rate(const ChannelParams& params, double step = 1e-3);

}  // namespace bmdf
