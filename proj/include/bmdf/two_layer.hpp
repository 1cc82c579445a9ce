// SPDX-License-Identifier: Apache-2.0

// Two-layer superposition over block-Markov decode-and-forward: decode
// events and throughput, the layer-1 relay feasibility conic, analytic
// layer decoding probabilities, discrete SISO layering and optimizers.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bmdf/channel.hpp"
#include "bmdf/montecarlo.hpp"

namespace bmdf {

struct LayerRates {
  double r1 = 0.0;
  double r2 = 0.0;
};

struct DecodeEvents {
  bool layer1_ok = false;
  bool layer2_ok = false;
};

/// Successive decoding at the destination: layer 1 needs both of its
/// conjuncts; layer 2 additionally needs layer 1. Zero rates always decode.
DecodeEvents decode_events(const ChannelParams& params, const FadingDraw& draw, const PowerSplit& split,
                           const CorrelationPair& corr, const LayerRates& rates);

/// Raw counts behind a two-layer Monte Carlo run.
struct TwoLayerCounts {
  std::size_t n = 0;
  std::size_t layer1 = 0;  // draws where layer 1 decodes
  std::size_t both = 0;    // draws where both layers decode

  /// r1 P(L1) + r2 P(L1 and L2).
  double throughput(const LayerRates& rates) const;
  /// r1 P(L1 and not L2) + (r1 + r2) P(L1 and L2), from the same counts.
  double throughput_by_outcome(const LayerRates& rates) const;
  ThroughputEstimate throughput_estimate(const LayerRates& rates, double se_multiplier) const;
  ThroughputEstimate p_layer1(double se_multiplier) const;
  ThroughputEstimate p_both(double se_multiplier) const;
};

TwoLayerCounts simulate_two_layer(const ChannelParams& params, const PowerSplit& split,
                                  const CorrelationPair& corr, const LayerRates& rates, const McConfig& cfg);

/// Same, over a fixed sample (common random numbers across candidates).
TwoLayerCounts simulate_two_layer_over(std::span<const FadingDraw> draws, const ChannelParams& params,
                                       const PowerSplit& split, const CorrelationPair& corr,
                                       const LayerRates& rates, unsigned workers = 1);

/// Monte Carlo average throughput. Deterministic given cfg.seed.
ThroughputEstimate average_throughput_mc(const ChannelParams& params, const PowerSplit& split,
                                         const CorrelationPair& corr, const LayerRates& rates,
                                         const McConfig& cfg);

/// Uncorrelated average throughput by quadrature over (nu_s, nu_r): the
/// inner nu_r integral is taken in closed form, the outer adaptively.
/// Relay conjuncts are deterministic indicators.
ThroughputEstimate average_throughput_uncorrelated(const ChannelParams& params, const PowerSplit& split,
                                                   const LayerRates& rates, double tol = 1e-6);

/// Left side of the layer-1 relay decodability condition as a quadratic form
/// in (rho1, rho2); the condition holds iff the value is positive.
double conic_lhs(const ChannelParams& params, const PowerSplit& split, double r1, double rho1, double rho2);

struct ConicClassification {
  bool feasible_at_origin = false;
  std::optional<double> rho1_cutoff;  // none when every rho1 in [0,1] is feasible at rho2 = 0
  double max_r1 = 0.0;
  std::optional<bool> probe_feasible;
  double probe_lhs = 0.0;
};

ConicClassification classify_conic(const ChannelParams& params, const PowerSplit& split, const LayerRates& rates,
                                   std::optional<CorrelationPair> probe = std::nullopt);

/// Upper limit on rho2 that keeps r2 decodable at the relay.
double rho2_cap(const ChannelParams& params, const PowerSplit& split, double r2);

/// P(layer-1 MISO mutual information > r1) by nested quadrature over the
/// magnitudes with the phase integrated in closed form (arcsin).
///
/// Requires 1 - beta_bar e^{r1} > 0 and beta >= alpha; throws DomainError
/// otherwise (callers fall back to Monte Carlo).
double p_layer1_miso_analytic(const ChannelParams& params, const PowerSplit& split, const CorrelationPair& corr,
                              double r1, double tol = 1e-6);

/// P(layer-2 MISO mutual information > r2); an upper bound on the joint
/// probability that both layers decode. rho2 == 1 uses the coherent closed
/// form exp(-(e^{r2} - 1) / (alpha_bar p_s + beta_bar p_r)).
double p_layer2_miso_analytic(const ChannelParams& params, const PowerSplit& split, double rho2, double r2,
                              double tol = 1e-6);

/// Monte Carlo counterparts of the two analytic probabilities.
ThroughputEstimate p_layer1_miso_mc(const ChannelParams& params, const PowerSplit& split,
                                    const CorrelationPair& corr, double r1, const McConfig& cfg);
ThroughputEstimate p_layer2_miso_mc(const ChannelParams& params, const PowerSplit& split, double rho2, double r2,
                                    const McConfig& cfg);

/// Analytic when its preconditions hold, Monte Carlo otherwise.
ThroughputEstimate p_layer1_miso(const ChannelParams& params, const PowerSplit& split, const CorrelationPair& corr,
                                 double r1, const McConfig& cfg, double tol = 1e-6);

/// Discrete N-layer superposition for a single Rayleigh link of power p_s.
/// Layer i is decodable iff the fading power is at least thresholds[i] and
/// carries rate log(1 + eta_i f_i p_s / (1 + eta_i p_s sum_{j>i} f_j)).
struct SisoLayering {
  int n_layers = 0;
  std::vector<double> thresholds;
  std::vector<double> rates;
  std::vector<double> splits;  // power fractions, summing to 1
  double objective = 0.0;      // sum_i rates[i] e^{-thresholds[i]}
};

/// Objective of a layering given thresholds and residual powers s_1 = p_s >
/// ... > s_N (power of layers i..N).
double siso_layering_objective(const std::vector<double>& thresholds, const std::vector<double>& residual);

SisoLayering optimize_siso_layering(double p_s, int n_layers);

/// Minimal collocation gain for the layering's rates to clear the relay:
/// the top-layer threshold.
double q_min_layers(double p_s, const SisoLayering& layering);

enum class TwoLayerMode { UncorrelatedAnalytic, CorrelatedMC };

struct TwoLayerSearchOptions {
  int budget = 4000;
  std::optional<double> fixed_alpha;
  std::optional<double> fixed_beta;
  double tol = 1e-7;
  McConfig mc{kDefaultSeed, 100'000, 1, kDefaultSeMultiplier};
  int rho_grid = 11;
};

struct TwoLayerOptimum {
  PowerSplit split;
  CorrelationPair corr;
  LayerRates rates;
  double value = 0.0;
  int evaluations = 0;
};

/// Best-found two-layer configuration. UncorrelatedAnalytic searches
/// (alpha, beta, r1, r2) on the quadrature throughput by multi-start
/// pattern search; CorrelatedMC then grids (rho1, rho2) over the feasible
/// region with common random numbers.
TwoLayerOptimum optimize_two_layer_throughput(const ChannelParams& params, TwoLayerMode mode,
                                              const TwoLayerSearchOptions& options = {});

/// Oblivious two-layer operation: the source keeps the SISO-optimal
/// two-layer rates and split for p_s alone; the relay's split beta is
/// either optimized or tied to alpha.
struct ObliviousTwoLayer {
  SisoLayering siso;
  PowerSplit split;
  LayerRates rates;
  double direct = 0.0;
  double bm = 0.0;
};

ObliviousTwoLayer oblivious_two_layer(const ChannelParams& params, bool optimize_beta, double tol = 1e-7);

}  // namespace bmdf
