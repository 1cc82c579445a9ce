// SPDX-License-Identifier: Apache-2.0

#include "bmdf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "bmdf/errors.hpp"

namespace bmdf {
namespace {

void RequireUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0, 1], got " << v;
    throw DomainError(os.str());
  }
}

double CheckedLog(double arg, const char* what) {
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "infeasible correlation: " << what << " log argument " << arg << " <= 0";
    throw InfeasibleCorrelation(os.str());
  }
  return std::log(arg);
}

}  // namespace

void ChannelParams::validate() const {
  if (!std::isfinite(p_s) || !(p_s > 0.0)) throw DomainError("p_s must be finite and > 0");
  if (!std::isfinite(p_r) || !(p_r >= 0.0)) throw DomainError("p_r must be finite and >= 0");
  if (!std::isfinite(q) || !(q > 0.0)) throw DomainError("q must be finite and > 0");
}

PowerSplit::PowerSplit(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  RequireUnit(alpha, "alpha");
  RequireUnit(beta, "beta");
}

void CorrelationPair::validate() const {
  RequireUnit(rho1, "rho1");
  RequireUnit(rho2, "rho2");
}

FadingDraw fading_from_block(const std::array<std::uint64_t, 4>& bits) {
  FadingDraw d;
  d.nu_s = -std::log(to_unit_open_closed(bits[0]));
  d.nu_r = -std::log(to_unit_open_closed(bits[1]));
  d.phi = 2.0 * std::numbers::pi * to_unit_closed_open(bits[2]);
  return d;
}

FadingDraw sample_fading(RngStream& stream) { return fading_from_block(stream.next()); }

DfRates df_rate_single(const ChannelParams& params, const FadingDraw& draw, double rho) {
  RequireUnit(rho, "rho");
  DfRates out;
  out.rate_relay = std::log1p(params.p_s * params.q * (1.0 - rho * rho));
  const double cross =
      2.0 * std::sqrt(params.p_s * params.p_r * draw.nu_s * draw.nu_r) * rho * std::cos(draw.phi);
  const double snr = draw.nu_s * params.p_s + draw.nu_r * params.p_r + cross;
  out.rate_miso = CheckedLog(1.0 + snr, "MISO");
  out.rate = std::min(out.rate_relay, out.rate_miso);
  return out;
}

LayerMutualInfos two_layer_mutual_infos(const ChannelParams& params, const FadingDraw& draw,
                                        const PowerSplit& split, const CorrelationPair& corr) {
  corr.validate();
  const double a = split.alpha(), b = split.beta();
  const double ab = split.alpha_bar(), bb = split.beta_bar();
  const double ps = params.p_s, pr = params.p_r, q = params.q;
  const double r1 = corr.rho1, r2 = corr.rho2;

  const double relay_num =
      1.0 + ps * q * (1.0 - a * b * r1 * r1 - ab * bb * r2 * r2 - 2.0 * std::sqrt(a * b * ab * bb) * r1 * r2);
  const double relay_den = 1.0 + q * ab * ps * (1.0 - r2 * r2);

  // Re(rho h_s h_r^*) = rho sqrt(nu_s nu_r) cos(phi).
  const double coherent = std::sqrt(draw.nu_s * draw.nu_r) * std::cos(draw.phi);
  const double cross1 = 2.0 * std::sqrt(a * b * ps * pr) * r1 * coherent;
  const double cross2 = 2.0 * std::sqrt(ab * bb * ps * pr) * r2 * coherent;
  const double miso_all = 1.0 + draw.nu_s * ps + draw.nu_r * pr + cross1 + cross2;
  const double miso_layer2 = 1.0 + draw.nu_s * ab * ps + draw.nu_r * bb * pr + cross2;

  CheckedLog(relay_num, "layer-1 relay");
  CheckedLog(miso_all, "layer-1 MISO");
  CheckedLog(miso_layer2, "layer-2 MISO");

  // Numerator minus denominator in closed form. Both are perfect squares
  // plus non-negative terms on [0,1]^2, so only rounding can push them below 0.
  const double relay_gain =
      ps * q * (a - a * b * r1 * r1 + ab * b * r2 * r2 - 2.0 * std::sqrt(a * b * ab * bb) * r1 * r2);
  const double miso_gain = draw.nu_s * a * ps + draw.nu_r * b * pr + cross1;

  LayerMutualInfos mi;
  mi.i1_relay = std::log1p(std::max(relay_gain, 0.0) / relay_den);
  mi.i1_miso = std::log1p(std::max(miso_gain, 0.0) / miso_layer2);
  mi.i2_relay = std::log1p(q * ab * ps * (1.0 - r2 * r2));
  mi.i2_miso = CheckedLog(miso_layer2, "layer-2 MISO");
  return mi;
}

}  // namespace bmdf
