// SPDX-License-Identifier: Apache-2.0

// Layer decoding probabilities with the phase integrated in closed form.
// Conditioned on nu_s = a and |h_r| = u, both layers decode iff
//   L u^2 + k u cos(phi) - C > 0,
// so P(success | a, u) = P(cos(phi) > f(u)) with f(u) = (C - L u^2) / (k u).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/two_layer.hpp"

namespace bmdf {
namespace {

// Beyond this |h_r| the Rayleigh weight 2u e^{-u^2} is below 1e-20.
constexpr double kUMax = 7.0;

// Rounding at the u-roots can push |f| slightly past 1.
double ClampedArcsin(double f) { return std::asin(std::clamp(f, -1.0, 1.0)); }

double ArcWeighted(double a, double b, double tol, const ScalarFn& arc) {
  const double hi = std::min(b, kUMax);
  if (!(hi > a)) return 0.0;
  return integrate_ts([&](double u) { return 2.0 * u * std::exp(-u * u) * arc(u); }, a, hi, tol);
}

// P over u ~ Rayleigh (u^2 ~ Exp(1)) and phi ~ U[0, 2pi) of
// L u^2 + k u cos(phi) > C, for L > 0.
double PhaseAveraged(double l, double k, double c, double tol) {
  if (k == 0.0) return c <= 0.0 ? 1.0 : std::exp(-c / l);
  const double disc = k * k + 4.0 * l * c;
  const auto f = [&](double u) { return (c - l * u * u) / (k * u); };
  if (k > 0.0) {
    const auto arc = [&](double u) { return 0.5 - ClampedArcsin(f(u)) / std::numbers::pi; };
    if (c >= 0.0) {
      // f decreases from +inf through 1 at u1 and -1 at u2.
      const double root = std::sqrt(disc);
      const double u1 = 2.0 * c / (k + root);
      const double u2 = (k + root) / (2.0 * l);
      return ArcWeighted(u1, u2, tol, arc) + std::exp(-u2 * u2);
    }
    if (disc > 0.0) {
      // f < 0 everywhere and >= -1 only on [u3, u2].
      const double root = std::sqrt(disc);
      const double u2 = (k + root) / (2.0 * l);
      const double u3 = -2.0 * c / (k + root);
      return ArcWeighted(u3, u2, tol, arc) + (-std::expm1(-u3 * u3)) + std::exp(-u2 * u2);
    }
    return 1.0;
  }
  // k < 0: the event is cos(phi) < f(u), and the roles of u1 and u2 swap.
  const auto arc = [&](double u) { return 0.5 + ClampedArcsin(f(u)) / std::numbers::pi; };
  if (c >= 0.0) {
    const double root = std::sqrt(disc);
    const double u2 = 2.0 * c / (-k + root);
    const double u1 = (-k + root) / (2.0 * l);
    return ArcWeighted(u2, u1, tol, arc) + std::exp(-u1 * u1);
  }
  if (disc > 0.0) {
    const double root = std::sqrt(disc);
    const double u1 = (-k + root) / (2.0 * l);
    const double u3 = -2.0 * c / (-k + root);
    return ArcWeighted(u3, u1, tol, arc) + (-std::expm1(-u3 * u3)) + std::exp(-u1 * u1);
  }
  return 1.0;
}

double Clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double p_layer1_miso_analytic(const ChannelParams& params, const PowerSplit& split, const CorrelationPair& corr,
                              double r1, double tol) {
  params.validate();
  corr.validate();
  if (r1 <= 0.0) return 1.0;
  const double ps = params.p_s, pr = params.p_r;
  const double a = split.alpha(), b = split.beta(), ab = split.alpha_bar(), bb = split.beta_bar();
  const double e = std::exp(r1);
  const double l = pr * (1.0 - bb * e);
  if (!(l > 0.0)) {
    std::ostringstream os;
    os << "layer-1 analytic probability needs 1 - beta_bar e^r1 > 0 and p_r > 0 (got L = " << l << ")";
    throw DomainError(os.str());
  }
  if (b < a) throw DomainError("layer-1 analytic probability needs beta >= alpha");

  const double kappa = 2.0 * std::sqrt(ps * pr) * (corr.rho1 * std::sqrt(a * b) + corr.rho2 * (1.0 - e) * std::sqrt(ab * bb));
  const double slope = ps * (1.0 - ab * e);  // C(a) = (e - 1) - a * slope
  std::vector<double> breaks;
  if (slope > 0.0) breaks.push_back(std::expm1(r1) / slope);  // a0: C changes sign
  const double denom = 4.0 * l * slope - kappa * kappa;
  if (denom > 0.0) breaks.push_back(4.0 * l * std::expm1(r1) / denom);  // a': discriminant vanishes

  const auto conditional = [&](double x) {
    return PhaseAveraged(l, std::sqrt(x) * kappa, std::expm1(r1) - x * slope, tol);
  };
  return Clamp01(integrate_exp_weight(conditional, 0.0, breaks, tol));
}

double p_layer2_miso_analytic(const ChannelParams& params, const PowerSplit& split, double rho2, double r2,
                              double tol) {
  params.validate();
  if (!(rho2 >= 0.0 && rho2 <= 1.0)) throw DomainError("rho2 must lie in [0, 1]");
  if (r2 <= 0.0) return 1.0;
  const double x = split.alpha_bar() * params.p_s, y = split.beta_bar() * params.p_r;
  const double c2 = std::expm1(r2);
  if (rho2 == 1.0) return x + y > 0.0 ? std::exp(-c2 / (x + y)) : 0.0;
  if (rho2 == 0.0 || x == 0.0 || y == 0.0) return pair_tail(x, y, c2);

  const double k_scale = 2.0 * rho2 * std::sqrt(x * y);
  const std::vector<double> breaks{c2 / x, c2 / ((1.0 - rho2 * rho2) * x)};
  const auto conditional = [&](double a) { return PhaseAveraged(y, k_scale * std::sqrt(a), c2 - a * x, tol); };
  return Clamp01(integrate_exp_weight(conditional, 0.0, breaks, tol));
}

}  // namespace bmdf
