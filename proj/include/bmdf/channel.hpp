// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bmdf/rng.hpp"

namespace bmdf {

/// Static scenario: source power, relay power and collocation gain, all
/// linear. Noise variances are unity at both receivers.
struct ChannelParams {
  double p_s = 1.0;
  double p_r = 1.0;
  double q = 1.0;

  /// Throws DomainError unless p_s > 0, p_r >= 0, q > 0 and all finite.
  void validate() const;
  double total_power() const { return p_s + p_r; }
};

/// One Rayleigh realization: squared magnitudes of h_s and h_r and the phase
/// of h_s * conj(h_r).
struct FadingDraw {
  double nu_s = 0.0;
  double nu_r = 0.0;
  double phi = 0.0;
};

/// Layer-1 power fractions at the source (alpha) and the relay (beta).
class PowerSplit {
 public:
  PowerSplit() = default;
  PowerSplit(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double alpha_bar() const { return 1.0 - alpha_; }
  double beta_bar() const { return 1.0 - beta_; }

 private:
  double alpha_ = 1.0;
  double beta_ = 1.0;
};

/// Real, non-negative per-layer correlation coefficients between the source
/// and relay transmissions.
struct CorrelationPair {
  double rho1 = 0.0;
  double rho2 = 0.0;

  void validate() const;
};

/// nu_s, nu_r ~ Exp(1) iid and phi ~ U[0, 2pi), from a single Philox block.
FadingDraw fading_from_block(const std::array<std::uint64_t, 4>& bits);

/// Draws the next realization from `stream`.
FadingDraw sample_fading(RngStream& stream);

struct DfRates {
  double rate_relay = 0.0;
  double rate_miso = 0.0;
  double rate = 0.0;
};

/// Single-layer decode-and-forward rate (nats): the minimum of the
/// source-relay term and the coherent MISO term at correlation rho.
DfRates df_rate_single(const ChannelParams& params, const FadingDraw& draw, double rho);

struct LayerMutualInfos {
  double i1_relay = 0.0;
  double i1_miso = 0.0;
  double i2_relay = 0.0;
  double i2_miso = 0.0;
};

/// Per-layer mutual informations (nats) of two-layer superposition under
/// block-Markov decode-and-forward. Layer 1 treats layer 2 as correlated
/// interference; layer 2 is evaluated after layer 1 is cancelled.
///
/// Throws InfeasibleCorrelation if any log argument is not positive.
LayerMutualInfos two_layer_mutual_infos(const ChannelParams& params, const FadingDraw& draw,
                                        const PowerSplit& split, const CorrelationPair& corr);

}  // namespace bmdf
