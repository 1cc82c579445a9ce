// SPDX-License-Identifier: Apache-2.0

#include "bmdf/single_layer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmdf/errors.hpp"
#include "bmdf/lambert_w.hpp"
#include "bmdf/numerics.hpp"

namespace bmdf {
namespace {

// Below this relative gap the divided differences switch to a midpoint
// Taylor expansion; the dropped term is O(gap^4).
constexpr double kNearEqualGap = 1e-5;

bool NearlyEqual(double x, double y) {
  return std::abs(x - y) <= kNearEqualGap * std::max(std::abs(x), std::abs(y));
}

double RateCap(const ChannelParams& params) { return std::log1p(params.p_s * params.q); }

}  // namespace

double success_prob_su(double rate, double p) {
  if (rate <= 0.0) return 1.0;
  return std::exp(-std::expm1(rate) / p);
}

double pair_tail(double x, double y, double c) {
  if (c <= 0.0) return 1.0;
  if (x <= 0.0 && y <= 0.0) return 0.0;
  if (NearlyEqual(x, y)) {
    const double m = 0.5 * (x + y), d = x - y;
    const double e = std::exp(-c / m);
    const double first = e * (1.0 + c / m);
    const double third = e * (c * c * c / std::pow(m, 5) - 3.0 * c * c / std::pow(m, 4));
    return first + third * d * d / 24.0;
  }
  const double hx = x > 0.0 ? x * std::exp(-c / x) : 0.0;
  const double hy = y > 0.0 ? y * std::exp(-c / y) : 0.0;
  return std::clamp((hx - hy) / (x - y), 0.0, 1.0);
}

double pair_tail_dc(double x, double y, double c) {
  if (NearlyEqual(x, y)) {
    const double m = 0.5 * (x + y), d = x - y;
    const double e = std::exp(-c / m);
    const double first = -c / (m * m) * e;
    const double third = e * (-std::pow(c, 3) / std::pow(m, 6) + 6.0 * c * c / std::pow(m, 5) -
                               6.0 * c / std::pow(m, 4));
    return first + third * d * d / 24.0;
  }
  const double gx = x > 0.0 ? std::exp(-c / x) : 0.0;
  const double gy = y > 0.0 ? std::exp(-c / y) : 0.0;
  return (gy - gx) / (x - y);
}

double success_prob_pair(double rate, double x, double y) {
  if (rate <= 0.0) return 1.0;
  return pair_tail(x, y, std::expm1(rate));
}

double crossover_x0() {
  static const double x0 = -2.0 * lambert_wm1(-0.5 * std::exp(-0.5)) - 1.0;
  return x0;
}

double gamma0() { return 0.5 * crossover_x0(); }

const char* to_string(RhoRegionKind k) {
  switch (k) {
    case RhoRegionKind::ZeroOptimal:
      return "zero-optimal";
    case RhoRegionKind::Ambiguous:
      return "ambiguous";
    case RhoRegionKind::MaxOptimal:
      return "max-optimal";
  }
  return "unknown";
}

RhoRegion classify_rho_region(double rate, const ChannelParams& params, double gamma, bool unbounded_q) {
  params.validate();
  const double g0 = gamma0();
  if (!(gamma >= g0)) {
    std::ostringstream os;
    os << "classify_rho_region: gamma " << gamma << " below gamma0 " << g0;
    throw DomainError(os.str());
  }
  const double p = params.total_power();
  RhoRegion region;
  region.r_low = std::log1p(g0 * p);
  region.r_high = unbounded_q ? region.r_low : std::log1p(gamma * p);
  if (rate < region.r_low) {
    region.kind = RhoRegionKind::ZeroOptimal;
  } else if (rate > region.r_high || (unbounded_q && rate >= region.r_low)) {
    region.kind = RhoRegionKind::MaxOptimal;
  } else {
    region.kind = RhoRegionKind::Ambiguous;
  }
  return region;
}

double rho_max(double rate, const ChannelParams& params) {
  const double c = std::expm1(rate);
  const double rho2 = 1.0 - c / (params.p_s * params.q);
  if (rho2 < 0.0) {
    std::ostringstream os;
    os << "rate " << rate << " exceeds the source-relay capacity " << RateCap(params);
    throw InfeasibleRate(os.str());
  }
  return std::sqrt(rho2);
}

CorrelatedAllocation correlated_allocation(double rate, const ChannelParams& params) {
  params.validate();
  rho_max(rate, params);
  const double c = std::max(0.0, std::expm1(rate));
  const double p = params.total_power();
  const double disc = p * p - 4.0 * params.p_r * c / params.q;
  if (disc < 0.0) throw InfeasibleRate("correlated_allocation: negative discriminant");
  CorrelatedAllocation alloc;
  alloc.p0 = 0.5 * (p + std::sqrt(disc));
  alloc.p0_bar = p - alloc.p0;
  alloc.skew_delta = (alloc.p0 - alloc.p0_bar) / p;
  return alloc;
}

double throughput(double rate, const ChannelParams& params, RhoMode mode) {
  if (rate <= 0.0) return 0.0;
  if (mode == RhoMode::RhoZero) {
    if (rate > RateCap(params)) return 0.0;
    return rate * success_prob_pair(rate, params.p_s, params.p_r);
  }
  const CorrelatedAllocation alloc = correlated_allocation(rate, params);
  return rate * pair_tail(alloc.p0, alloc.p0_bar, std::expm1(rate));
}

double miso_throughput_derivative(double rate, double x, double y) {
  const double c = std::expm1(rate);
  if (NearlyEqual(x, y) || c <= 0.0) return pair_tail(x, y, c) + rate * std::exp(rate) * pair_tail_dc(x, y, c);
  // Scale by exp(-c / max(x, y)) so the sign survives underflow at large rates.
  const double m = std::max(x, y);
  const double sx = x > 0.0 ? std::exp(c / m - c / x) : 0.0;
  const double sy = y > 0.0 ? std::exp(c / m - c / y) : 0.0;
  const double scaled = ((x * sx - y * sy) + rate * std::exp(rate) * (sy - sx)) / (x - y);
  return std::exp(-c / m) * scaled;
}

RateOptimum maximize_throughput(const ChannelParams& params, RhoMode mode) {
  params.validate();
  const double lo = 1e-6;
  const double hi = std::min(std::log1p(1e3 * params.total_power()), RateCap(params));
  if (!(hi > lo)) return {lo, throughput(lo, params, mode)};
  const auto f = [&](double r) { return throughput(r, params, mode); };
  const ScalarOptimum g = golden_section_maximize(f, lo, hi, 1e-9);
  RateOptimum best{g.x, g.value};
  if (mode == RhoMode::RhoZero) {
    const auto deriv = [&](double r) { return miso_throughput_derivative(r, params.p_s, params.p_r); };
    const double a = std::max(lo, g.x - 1e-6), b = std::min(hi, g.x + 1e-6);
    if (deriv(a) > 0.0 && deriv(b) < 0.0) {
      best.rate = bisect_root(deriv, a, b, 1e-15);
      best.value = f(best.rate);
    }
  }
  return best;
}

double oblivious_su_rate(double p_s) {
  if (!(p_s > 0.0)) throw DomainError("oblivious_su_rate: p_s must be > 0");
  return lambert_w0(p_s);
}

double direct_throughput(double p_s) {
  const double r = oblivious_su_rate(p_s);
  return r * success_prob_su(r, p_s);
}

double oblivious_bm_throughput(const ChannelParams& params) {
  return throughput(oblivious_su_rate(params.p_s), params, RhoMode::RhoZero);
}

double q_min_single(double p_s) {
  if (!(p_s > 0.0)) throw DomainError("q_min_single: p_s must be > 0");
  return std::expm1(lambert_w0(p_s)) / p_s;
}

double p_s_star(double q) {
  if (!(q > 0.0)) throw DomainError("p_s_star: collocation gain must be > 0");
  if (q >= 1.0) return 0.0;
  const double inv_q = 1.0 / q;
  const double w = lambert_w0(-inv_q * std::exp(-inv_q));
  return std::expm1(w + inv_q) / q;
}

double stationary_source_power(double rate) {
  const double c = std::expm1(rate);
  return 0.5 * (-c + std::sqrt(c * c + 4.0 * rate * c * std::exp(rate)));
}

double ratio_bound_lhs(double p_s, double p_r) {
  if (NearlyEqual(p_s, p_r)) return 0.75 * (p_s + p_r);
  const double es = std::exp(-p_r / p_s), er = std::exp(-p_s / p_r);
  return (p_s * es - p_r * er) / (es - er);
}

double k_alpha(double alpha, double s) {
  const double d = std::sqrt(std::max(0.0, 1.0 - 2.0 * alpha / s));
  return pair_tail(1.0 + d, 1.0 - d, 2.0 * alpha);
}

Conjecture1Audit audit_conjecture1(const ChannelParams& params, const std::vector<double>& alpha_grid) {
  params.validate();
  Conjecture1Audit audit;
  const double p = params.total_power();
  audit.r0 = std::log1p(p);
  audit.r0_decodable = params.p_s * params.q >= p;
  audit.s = p * params.q / (2.0 * params.p_r);
  if (!audit.r0_decodable) {
    audit.pass = true;
    audit.alphas_skipped = alpha_grid.size();
    return audit;
  }

  audit.derivative_at_r0 = miso_throughput_derivative(audit.r0, params.p_s, params.p_r);
  audit.derivative_negative = audit.derivative_at_r0 < 0.0;
  audit.slope_lhs = ratio_bound_lhs(params.p_s, params.p_r);
  audit.slope_rhs = audit.r0 * (1.0 + p);
  audit.slope_inequality = audit.slope_lhs < audit.slope_rhs;
  if (params.p_s > params.p_r) audit.sum_power_bound = audit.slope_lhs < p;

  const double k1 = k_alpha(1.0, audit.s);
  bool alphas_ok = true;
  for (const double alpha : alpha_grid) {
    if (!(alpha > 1.0 && alpha <= 0.5 * audit.s)) {
      ++audit.alphas_skipped;
      continue;
    }
    AlphaCheck check;
    check.alpha = alpha;
    check.k1 = k1;
    check.alpha_k_alpha = alpha * k_alpha(alpha, audit.s);
    check.pass = check.alpha_k_alpha < check.k1;
    alphas_ok = alphas_ok && check.pass;
    audit.alpha_checks.push_back(check);
  }
  audit.pass = audit.derivative_negative && audit.slope_inequality && audit.sum_power_bound && alphas_ok;
  return audit;
}

int count_derivative_sign_changes(const ChannelParams& params, int points) {
  params.validate();
  const double r_max = std::log1p(1e3 * params.total_power());
  const double r_min = r_max * 1e-6;
  const double ratio = std::pow(r_max / r_min, 1.0 / (points - 1));
  int changes = 0;
  int last_sign = 0;
  double r = r_min;
  for (int i = 0; i < points; ++i, r *= ratio) {
    const double d = miso_throughput_derivative(std::min(r, r_max), params.p_s, params.p_r);
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return changes;
}

bool unimodality_check(const ChannelParams& params) { return count_derivative_sign_changes(params) == 1; }

std::optional<double> first_rhomax_preferred_rate(const ChannelParams& params, double step) {
  params.validate();
  const double cap = RateCap(params);
  for (long k = 1;; ++k) {
    const double r = static_cast<double>(k) * step;
    if (r > cap) break;
    if (throughput(r, params, RhoMode::RhoMax) > throughput(r, params, RhoMode::RhoZero)) return r;
  }
  return std::nullopt;
}

}  // namespace bmdf
