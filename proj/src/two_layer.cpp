// SPDX-License-Identifier: Apache-2.0

#include "bmdf/two_layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"

namespace bmdf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Decoding at exactly the mutual information counts as failure.
bool Clears(double mutual_info, double rate) { return rate <= 0.0 || mutual_info > rate; }

void RequireRates(const LayerRates& rates) {
  if (!(rates.r1 >= 0.0) || !(rates.r2 >= 0.0)) throw DomainError("layer rates must be >= 0");
}

// {v >= 0 : v * c > d} as [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = kInf;

  double mass() const { return hi > lo ? std::exp(-lo) - std::exp(-hi) : 0.0; }
};

Interval LinearCondition(double c, double d) {
  if (c > 0.0) return {std::max(0.0, d / c), kInf};
  if (c < 0.0) return {0.0, std::max(0.0, d / c)};
  return d < 0.0 ? Interval{0.0, kInf} : Interval{0.0, 0.0};
}

Interval Intersect(const Interval& x, const Interval& y) { return {std::max(x.lo, y.lo), std::min(x.hi, y.hi)}; }

}  // namespace

DecodeEvents decode_events(const ChannelParams& params, const FadingDraw& draw, const PowerSplit& split,
                           const CorrelationPair& corr, const LayerRates& rates) {
  const LayerMutualInfos mi = two_layer_mutual_infos(params, draw, split, corr);
  DecodeEvents ev;
  ev.layer1_ok = Clears(mi.i1_relay, rates.r1) && Clears(mi.i1_miso, rates.r1);
  ev.layer2_ok = ev.layer1_ok && Clears(mi.i2_relay, rates.r2) && Clears(mi.i2_miso, rates.r2);
  return ev;
}

double TwoLayerCounts::throughput(const LayerRates& rates) const {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  return rates.r1 * static_cast<double>(layer1) / nn + rates.r2 * static_cast<double>(both) / nn;
}

double TwoLayerCounts::throughput_by_outcome(const LayerRates& rates) const {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  return rates.r1 * static_cast<double>(layer1 - both) / nn + (rates.r1 + rates.r2) * static_cast<double>(both) / nn;
}

ThroughputEstimate TwoLayerCounts::throughput_estimate(const LayerRates& rates, double se_multiplier) const {
  ThroughputEstimate e;
  e.n = n;
  e.provenance = Provenance::MonteCarlo;
  e.se_multiplier = se_multiplier;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  const double only1 = static_cast<double>(layer1 - both) / nn;
  const double pb = static_cast<double>(both) / nn;
  const double hi = rates.r1 + rates.r2;
  e.value = rates.r1 * only1 + hi * pb;
  if (n > 1) {
    const double second = rates.r1 * rates.r1 * only1 + hi * hi * pb;
    const double var = std::max(0.0, (second - e.value * e.value) * nn / (nn - 1.0));
    e.half_width = se_multiplier * std::sqrt(var / nn);
  }
  return e;
}

namespace {

ThroughputEstimate ProportionEstimate(std::size_t hits, std::size_t n, double se_multiplier) {
  ThroughputEstimate e;
  e.n = n;
  e.provenance = Provenance::MonteCarlo;
  e.se_multiplier = se_multiplier;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  e.value = static_cast<double>(hits) / nn;
  if (n > 1) e.half_width = se_multiplier * std::sqrt(e.value * (1.0 - e.value) / (nn - 1.0));
  return e;
}

template <class Source>
TwoLayerCounts CountEvents(std::size_t n, unsigned workers, Source&& draw_of, const ChannelParams& params,
                           const PowerSplit& split, const CorrelationPair& corr, const LayerRates& rates) {
  params.validate();
  corr.validate();
  RequireRates(rates);
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::array<std::size_t, 2>> partial(blocks, {0, 0});
  for_each_block(blocks, workers, [&](std::size_t b) {
    const std::size_t hi = std::min(n, (b + 1) * kMcBlockSize);
    auto& acc = partial[b];
    for (std::size_t i = b * kMcBlockSize; i < hi; ++i) {
      const DecodeEvents ev = decode_events(params, draw_of(i), split, corr, rates);
      acc[0] += ev.layer1_ok;
      acc[1] += ev.layer2_ok;
    }
  });
  TwoLayerCounts counts;
  counts.n = n;
  for (const auto& p : partial) {
    counts.layer1 += p[0];
    counts.both += p[1];
  }
  return counts;
}

template <class Event>
ThroughputEstimate EventProbability(const McConfig& cfg, Event&& event) {
  const RngStream stream(cfg.seed);
  const std::size_t n = cfg.samples;
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::size_t> partial(blocks, 0);
  for_each_block(blocks, cfg.workers, [&](std::size_t b) {
    const std::size_t hi = std::min(n, (b + 1) * kMcBlockSize);
    std::size_t hits = 0;
    for (std::size_t i = b * kMcBlockSize; i < hi; ++i) hits += event(draw_at(stream, i));
    partial[b] = hits;
  });
  std::size_t hits = 0;
  for (const std::size_t h : partial) hits += h;
  return ProportionEstimate(hits, n, cfg.se_multiplier);
}

}  // namespace

ThroughputEstimate TwoLayerCounts::p_layer1(double se_multiplier) const {
  return ProportionEstimate(layer1, n, se_multiplier);
}

ThroughputEstimate TwoLayerCounts::p_both(double se_multiplier) const {
  return ProportionEstimate(both, n, se_multiplier);
}

TwoLayerCounts simulate_two_layer(const ChannelParams& params, const PowerSplit& split,
                                  const CorrelationPair& corr, const LayerRates& rates, const McConfig& cfg) {
  const RngStream stream(cfg.seed);
  return CountEvents(
      cfg.samples, cfg.workers, [&](std::size_t i) { return draw_at(stream, i); }, params, split, corr, rates);
}

TwoLayerCounts simulate_two_layer_over(std::span<const FadingDraw> draws, const ChannelParams& params,
                                       const PowerSplit& split, const CorrelationPair& corr,
                                       const LayerRates& rates, unsigned workers) {
  return CountEvents(
      draws.size(), workers, [&](std::size_t i) { return draws[i]; }, params, split, corr, rates);
}

ThroughputEstimate average_throughput_mc(const ChannelParams& params, const PowerSplit& split,
                                         const CorrelationPair& corr, const LayerRates& rates,
                                         const McConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("average_throughput_mc: samples must be >= 1");
  return simulate_two_layer(params, split, corr, rates, cfg).throughput_estimate(rates, cfg.se_multiplier);
}

ThroughputEstimate average_throughput_uncorrelated(const ChannelParams& params, const PowerSplit& split,
                                                   const LayerRates& rates, double tol) {
  params.validate();
  RequireRates(rates);
  const double ps = params.p_s, pr = params.p_r, q = params.q;
  const double ab = split.alpha_bar(), bb = split.beta_bar();
  const double e1 = std::exp(rates.r1);

  const bool relay1 = Clears(std::log1p(ps * q * split.alpha() / (1.0 + q * ab * ps)), rates.r1);
  const bool relay2 = Clears(std::log1p(q * ab * ps), rates.r2);
  if (!relay1) return ThroughputEstimate::exact(0.0, Provenance::Quadrature);

  // Given nu_s = a, each MISO conjunct is linear in nu_r: v * c_i > d_i(a).
  const double c1 = pr * (1.0 - bb * e1);
  const double c2 = bb * pr;
  const auto d1 = [&](double a) { return std::expm1(rates.r1) + a * ps * (ab * e1 - 1.0); };
  const auto d2 = [&](double a) { return std::expm1(rates.r2) - a * ab * ps; };
  const auto layer1 = [&](double a) {
    return rates.r1 <= 0.0 ? Interval{} : LinearCondition(c1, d1(a));
  };
  const auto layer2 = [&](double a) {
    return rates.r2 <= 0.0 ? Interval{} : LinearCondition(c2, d2(a));
  };

  std::vector<double> breaks;
  const auto add_root = [&](double slope, double intercept) {
    if (slope != 0.0) {
      const double a = -intercept / slope;
      if (std::isfinite(a) && a > 0.0) breaks.push_back(a);
    }
  };
  add_root(ps * (ab * e1 - 1.0), std::expm1(rates.r1));
  add_root(-ab * ps, std::expm1(rates.r2));
  // d1 / c1 == d2 / c2.
  add_root(c2 * ps * (ab * e1 - 1.0) + c1 * ab * ps, c2 * std::expm1(rates.r1) - c1 * std::expm1(rates.r2));

  const double p1 = integrate_exp_weight([&](double a) { return layer1(a).mass(); }, 0.0, breaks, tol);
  double p12 = 0.0;
  if (relay2 && rates.r2 > 0.0) {
    p12 = integrate_exp_weight([&](double a) { return Intersect(layer1(a), layer2(a)).mass(); }, 0.0, breaks,
                               tol);
  } else if (relay2) {
    p12 = p1;
  }
  return ThroughputEstimate::exact(rates.r1 * p1 + rates.r2 * p12, Provenance::Quadrature);
}

double conic_lhs(const ChannelParams& params, const PowerSplit& split, double r1, double rho1, double rho2) {
  const double ps = params.p_s, q = params.q;
  const double a = split.alpha(), b = split.beta(), ab = split.alpha_bar(), bb = split.beta_bar();
  const double e = std::exp(r1);
  const double f = 1.0 + ps * q - e * (1.0 + q * ab * ps);
  return rho1 * rho1 * (-ps * q * a * b) + rho2 * rho2 * (q * ab * ps * e - ps * q * ab * bb) +
         rho1 * rho2 * (-2.0 * ps * q * std::sqrt(a * b * ab * bb)) + f;
}

namespace {

// Absolute slack on the conic sign: values within rounding of zero count as
// infeasible.
double ConicSlack(const ChannelParams& params, double r1) {
  return 1e-12 * (1.0 + params.p_s * params.q) * std::exp(r1);
}

}  // namespace

ConicClassification classify_conic(const ChannelParams& params, const PowerSplit& split, const LayerRates& rates,
                                   std::optional<CorrelationPair> probe) {
  params.validate();
  const double ps = params.p_s, q = params.q;
  const double slack = ConicSlack(params, rates.r1);
  ConicClassification out;
  const double f = conic_lhs(params, split, rates.r1, 0.0, 0.0);
  out.feasible_at_origin = f > slack;
  out.max_r1 = std::log1p(ps * q * (1.0 - split.alpha_bar() * split.beta_bar()));
  if (!out.feasible_at_origin) {
    out.rho1_cutoff = 0.0;
  } else {
    const double denom = ps * q * split.alpha() * split.beta();
    if (denom > 0.0) {
      const double rho_star = std::sqrt(f / denom);
      if (rho_star <= 1.0) out.rho1_cutoff = rho_star;
    }
  }
  if (probe) {
    probe->validate();
    out.probe_lhs = conic_lhs(params, split, rates.r1, probe->rho1, probe->rho2);
    out.probe_feasible = out.probe_lhs > slack;
  }
  return out;
}

double rho2_cap(const ChannelParams& params, const PowerSplit& split, double r2) {
  params.validate();
  if (r2 <= 0.0) return 1.0;
  const double snr = params.q * split.alpha_bar() * params.p_s;
  const double v = 1.0 - std::expm1(r2) / snr;
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << "rate " << r2 << " is not decodable at the relay for any rho2";
    throw InfeasibleRate(os.str());
  }
  return std::sqrt(v);
}

ThroughputEstimate p_layer1_miso_mc(const ChannelParams& params, const PowerSplit& split,
                                    const CorrelationPair& corr, double r1, const McConfig& cfg) {
  params.validate();
  corr.validate();
  return EventProbability(cfg, [&](const FadingDraw& d) {
    return Clears(two_layer_mutual_infos(params, d, split, corr).i1_miso, r1);
  });
}

ThroughputEstimate p_layer2_miso_mc(const ChannelParams& params, const PowerSplit& split, double rho2, double r2,
                                    const McConfig& cfg) {
  params.validate();
  const CorrelationPair corr{0.0, rho2};
  corr.validate();
  return EventProbability(cfg, [&](const FadingDraw& d) {
    return Clears(two_layer_mutual_infos(params, d, split, corr).i2_miso, r2);
  });
}

ThroughputEstimate p_layer1_miso(const ChannelParams& params, const PowerSplit& split, const CorrelationPair& corr,
                                 double r1, const McConfig& cfg, double tol) {
  try {
    return ThroughputEstimate::exact(p_layer1_miso_analytic(params, split, corr, r1, tol), Provenance::Quadrature);
  } catch (const DomainError&) {
    return p_layer1_miso_mc(params, split, corr, r1, cfg);
  }
}

}  // namespace bmdf
