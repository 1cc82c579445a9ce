// SPDX-License-Identifier: Apache-2.0

#include "bmdf/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bmdf/errors.hpp"

namespace bmdf {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kBranchPointSlack = 1e-15;
constexpr int kMaxIterations = 50;
constexpr double kStepTolerance = 1e-14;

// Series in p = +-sqrt(2(e x + 1)) around the branch point.
double BranchPointSeries(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

double InitialGuess(double x, WBranch branch) {
  if (branch == WBranch::Principal) {
    if (x < -0.25) return BranchPointSeries(std::sqrt(2.0 * (std::numbers::e * x + 1.0)));
    if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  if (x < -0.25) return BranchPointSeries(-std::sqrt(2.0 * (std::numbers::e * x + 1.0)));
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

[[noreturn]] void ThrowDomain(double x, WBranch branch) {
  std::ostringstream os;
  os.precision(17);
  os << "lambert_w: argument " << x << " outside the domain of the "
     << (branch == WBranch::Principal ? "principal" : "-1") << " branch";
  throw DomainError(os.str());
}

}  // namespace

double lambert_w(double x, WBranch branch) {
  if (std::isnan(x)) ThrowDomain(x, branch);
  if (std::abs(x + kInvE) <= kBranchPointSlack) return -1.0;
  if (x < -kInvE) ThrowDomain(x, branch);
  if (branch == WBranch::MinusOne && x >= 0.0) ThrowDomain(x, branch);
  if (branch == WBranch::Principal) {
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
  }

  double w = InitialGuess(x, branch);
  for (int i = 0; i < kMaxIterations; ++i) {
    // Halley step on f(w) = w e^w - x.
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= kStepTolerance * (1.0 + std::abs(w))) break;
  }

  // Keep the result on the requested side of the branch point.
  if (branch == WBranch::Principal && w < -1.0) w = -1.0;
  if (branch == WBranch::MinusOne && w > -1.0) w = -1.0;
  return w;
}

}  // namespace bmdf
