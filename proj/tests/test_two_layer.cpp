// SPDX-License-Identifier: Apache-2.0

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "bmdf/errors.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/two_layer.hpp"
#include "doctest.h"

using namespace bmdf;

namespace {

// P(nu_r c1 > d0 + nu_s d1) for iid unit exponentials, integrating the
// closed-form inner probability over nu_s with Gauss-Kronrod.
double LinearEventProbability(double c1, double d0, double d1) {
  const auto inner = [&](double a) {
    const double d = d0 + a * d1;
    double p;
    if (c1 > 0.0) {
      p = d <= 0.0 ? 1.0 : std::exp(-d / c1);
    } else if (c1 < 0.0) {
      p = d >= 0.0 ? 0.0 : -std::expm1(d / c1);
    } else {
      p = d < 0.0 ? 1.0 : 0.0;
    }
    return p * std::exp(-a);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double top = 80.0;
  double split = d1 != 0.0 ? -d0 / d1 : -1.0;
  if (!(split > 0.0 && split < top)) return GK::integrate(inner, 0.0, top, 20, 1e-13);
  return GK::integrate(inner, 0.0, split, 20, 1e-13) + GK::integrate(inner, split, top, 20, 1e-13);
}

const ChannelParams kSpecParams{10.0, 10.0, 100.0};

}  // namespace

TEST_CASE("decode events") {
  const FadingDraw d{0.4, 1.7, 2.0};
  const DecodeEvents zero = decode_events(kSpecParams, d, PowerSplit(0.3, 0.5), {0.2, 0.3}, {0.0, 0.0});
  CHECK(zero.layer1_ok);
  CHECK(zero.layer2_ok);

  const PowerSplit split(0.7, 0.7);
  const double relay_cap2 = std::log1p(kSpecParams.q * split.alpha_bar() * kSpecParams.p_s);
  RngStream s(3);
  for (int i = 0; i < 1000; ++i) {
    const DecodeEvents ev = decode_events(kSpecParams, sample_fading(s), split, {0.0, 0.0}, {0.1, relay_cap2 + 1e-3});
    REQUIRE_FALSE(ev.layer2_ok);
  }
}

TEST_CASE("throughput decompositions agree on counts") {
  const LayerRates rates{0.8, 0.6};
  const TwoLayerCounts c = simulate_two_layer(kSpecParams, PowerSplit(0.6, 0.7), {0.1, 0.2}, rates, {11, 10'000});
  CHECK(c.n == 10'000);
  CHECK(c.both <= c.layer1);
  CHECK(c.throughput(rates) == doctest::Approx(c.throughput_by_outcome(rates)).epsilon(1e-14));
  const ThroughputEstimate e = c.throughput_estimate(rates, 4.0);
  CHECK(e.value == doctest::Approx(c.throughput(rates)).epsilon(1e-14));
  CHECK(e.half_width > 0.0);
}

TEST_CASE("zero rates give zero throughput") {
  const ThroughputEstimate e = average_throughput_mc(kSpecParams, PowerSplit(0.5, 0.5), {0.0, 0.0}, {0.0, 0.0}, {1, 5000});
  CHECK(e.value == 0.0);
  CHECK(e.half_width == 0.0);
  CHECK(average_throughput_uncorrelated(kSpecParams, PowerSplit(0.5, 0.5), {0.0, 0.0}).value == 0.0);
}

TEST_CASE("a coherent second layer never decodes") {
  const LayerRates rates{0.5, 0.4};
  const TwoLayerCounts c = simulate_two_layer(kSpecParams, PowerSplit(0.6, 0.6), {0.0, 1.0}, rates, {5, 20'000});
  CHECK(c.layer1 > 0);
  CHECK(c.both == 0);
}

TEST_CASE("uncorrelated quadrature against Monte Carlo") {
  const PowerSplit split(0.8, 0.8);
  for (const LayerRates rates : {LayerRates{1.0, 1.5}, LayerRates{0.5, 0.7}, LayerRates{2.0, 0.3}}) {
    const double quad = average_throughput_uncorrelated(kSpecParams, split, rates).value;
    const ThroughputEstimate mc = average_throughput_mc(kSpecParams, split, {0.0, 0.0}, rates, {21, 1'000'000});
    CHECK(mc.covers(quad));
  }
}

TEST_CASE("uncorrelated quadrature collapses to one layer") {
  const ChannelParams p{3.0, 5.0, 50.0};
  for (double r1 : {0.3, 1.0, 2.0}) {
    const double two = average_throughput_uncorrelated(p, PowerSplit(1.0, 1.0), {r1, 0.0}, 1e-9).value;
    CHECK(two == doctest::Approx(r1 * success_prob_pair(r1, p.p_s, p.p_r)).epsilon(1e-7));
  }
  CHECK(average_throughput_uncorrelated(p, PowerSplit(0.8, 0.9), {40.0, 0.5}).value == 0.0);
}

TEST_CASE("feasibility conic") {
  const PowerSplit split(0.5, 0.5);
  const ChannelParams p{10.0, 10.0, 1.0};
  const double low_r1 = 0.5 * std::log((1.0 + p.p_s * p.q) / (1.0 + p.q * split.alpha_bar() * p.p_s));
  CHECK(*classify_conic(p, split, {low_r1, 0.0}, CorrelationPair{0.0, 0.0}).probe_feasible);

  const ConicClassification none = classify_conic(p, split, {0.0, 0.0});
  CHECK_FALSE(none.rho1_cutoff.has_value());

  const ConicClassification at_max = classify_conic(p, split, {0.0, 0.0});
  CHECK(at_max.max_r1 == doctest::Approx(std::log1p(p.p_s * p.q * (1.0 - split.alpha_bar() * split.beta_bar()))));
  const ConicClassification boundary = classify_conic(p, split, {at_max.max_r1, 0.0}, CorrelationPair{0.0, 1.0});
  CHECK_FALSE(*boundary.probe_feasible);
  CHECK(std::abs(boundary.probe_lhs) < 1e-9);
}

TEST_CASE("layer-1 rate cap leaves no successes at rho = (0, 1)") {
  const PowerSplit split(0.4, 0.6);
  const double cap = classify_conic(kSpecParams, split, {0.0, 0.0}).max_r1;
  const TwoLayerCounts c = simulate_two_layer(kSpecParams, split, {0.0, 1.0}, {cap * 1.001, 0.0}, {8, 10'000});
  CHECK(c.layer1 == 0);
}

TEST_CASE("second-layer correlation cap") {
  const PowerSplit split(0.6, 0.6);
  const double r2 = 1.0;
  const double cap = rho2_cap(kSpecParams, split, r2);
  const double expected = std::sqrt(1.0 - std::expm1(r2) / (kSpecParams.q * split.alpha_bar() * kSpecParams.p_s));
  CHECK(cap == doctest::Approx(expected));
  CHECK(rho2_cap(kSpecParams, split, 0.0) == 1.0);
  CHECK_THROWS_AS(rho2_cap(kSpecParams, split, 10.0), InfeasibleRate);
}

TEST_CASE("layer-1 probability at zero correlation matches an independent integrator") {
  for (const auto& [alpha, beta, r1] : {std::array{0.3, 0.5, 0.5}, std::array{0.8, 0.8, 1.0}, std::array{0.5, 0.9, 0.2},
                                        std::array{0.1, 0.1, 0.05}}) {
    const PowerSplit split(alpha, beta);
    const double e = std::exp(r1);
    const double c1 = kSpecParams.p_r * (1.0 - split.beta_bar() * e);
    const double oracle = LinearEventProbability(c1, std::expm1(r1), kSpecParams.p_s * (split.alpha_bar() * e - 1.0));
    CHECK(p_layer1_miso_analytic(kSpecParams, split, {0.0, 0.0}, r1, 1e-9) == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("layer-1 probability against Monte Carlo in both phase regimes") {
  const McConfig cfg{31, 1'000'000};
  const PowerSplit split(0.3, 0.5);
  for (const CorrelationPair corr : {CorrelationPair{0.2, 0.3}, CorrelationPair{0.1, 0.9}, CorrelationPair{0.9, 0.0}}) {
    const double analytic = p_layer1_miso_analytic(kSpecParams, split, corr, 0.5);
    CHECK(p_layer1_miso_mc(kSpecParams, split, corr, 0.5, cfg).covers(analytic));
  }
}

TEST_CASE("layer-1 probability limits and domain") {
  const PowerSplit split(0.3, 0.5);
  CHECK(p_layer1_miso_analytic(kSpecParams, split, {0.2, 0.3}, 0.0) == 1.0);
  CHECK_THROWS_AS(p_layer1_miso_analytic(kSpecParams, PowerSplit(0.6, 0.5), {0.0, 0.0}, 0.5), DomainError);
  CHECK_THROWS_AS(p_layer1_miso_analytic(kSpecParams, PowerSplit(0.1, 0.2), {0.0, 0.0}, 2.0), DomainError);
  const ThroughputEstimate fallback = p_layer1_miso(kSpecParams, PowerSplit(0.6, 0.5), {0.0, 0.0}, 0.5, {1, 20'000});
  CHECK(fallback.provenance == Provenance::MonteCarlo);
  const ThroughputEstimate direct = p_layer1_miso(kSpecParams, split, {0.0, 0.0}, 0.5, {1, 20'000});
  CHECK(direct.provenance != Provenance::MonteCarlo);
}

TEST_CASE("layer-2 probability") {
  const PowerSplit split(0.5, 0.5);
  const double x = split.alpha_bar() * kSpecParams.p_s, y = split.beta_bar() * kSpecParams.p_r;
  CHECK(p_layer2_miso_analytic(kSpecParams, split, 0.4, 0.0) == 1.0);
  CHECK(p_layer2_miso_analytic(kSpecParams, split, 0.0, 0.7) == doctest::Approx(pair_tail(x, y, std::expm1(0.7))));
  const double coherent = p_layer2_miso_analytic(kSpecParams, split, 1.0, 0.7);
  CHECK(coherent == doctest::Approx(std::exp(-std::expm1(0.7) / (x + y))));
  CHECK(p_layer2_miso_analytic(kSpecParams, split, 1.0 - 1e-9, 0.7, 1e-9) == doctest::Approx(coherent).epsilon(1e-5));
  CHECK(p_layer2_miso_analytic(kSpecParams, split, 1e-9, 0.7, 1e-9) ==
        doctest::Approx(pair_tail(x, y, std::expm1(0.7))).epsilon(1e-6));
  const ThroughputEstimate mc = p_layer2_miso_mc(kSpecParams, split, 0.5, 0.7, {17, 1'000'000});
  CHECK(mc.covers(p_layer2_miso_analytic(kSpecParams, split, 0.5, 0.7)));
}

TEST_CASE("layer-2 probability bounds the joint decoding probability") {
  const PowerSplit split(0.6, 0.7);
  const CorrelationPair corr{0.2, 0.4};
  const LayerRates rates{0.6, 0.8};
  const TwoLayerCounts c = simulate_two_layer(kSpecParams, split, corr, rates, {4, 400'000});
  const ThroughputEstimate both = c.p_both(4.0);
  CHECK(both.value - both.half_width <= p_layer2_miso_analytic(kSpecParams, split, corr.rho2, rates.r2));
}

TEST_CASE("two-layer optimiser contains the single-layer optimum") {
  const ChannelParams p{100.0, 100.0, 100.0};
  TwoLayerSearchOptions forced;
  forced.fixed_alpha = 1.0;
  forced.fixed_beta = 1.0;
  const TwoLayerOptimum single = optimize_two_layer_throughput(p, TwoLayerMode::UncorrelatedAnalytic, forced);
  const RateOptimum reference = maximize_throughput(p, RhoMode::RhoZero);
  CHECK(single.value == doctest::Approx(reference.value).epsilon(1e-6));
  const TwoLayerOptimum free = optimize_two_layer_throughput(p, TwoLayerMode::UncorrelatedAnalytic);
  CHECK(free.value >= single.value - 1e-9);
}

TEST_CASE("oblivious two-layer operation") {
  const ChannelParams p{100.0, 100.0, 10.0};
  const ObliviousTwoLayer tied = oblivious_two_layer(p, false);
  const ObliviousTwoLayer tuned = oblivious_two_layer(p, true);
  CHECK(tied.split.beta() == tied.split.alpha());
  CHECK(tuned.bm >= tied.bm - 1e-12);
  CHECK(tuned.bm > tuned.direct);
  CHECK(tuned.direct == doctest::Approx(optimize_siso_layering(p.p_s, 2).objective));
}
