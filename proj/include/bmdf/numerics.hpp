// SPDX-License-Identifier: Apache-2.0

// Root finding, 1-D / box-constrained search and quadrature used by the
// analytic evaluators. Quadrature is delegated to Boost.Math.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bmdf {

using ScalarFn = std::function<double(double)>;

/// Bisection for a sign change of g on [lo, hi]; returns the midpoint of the
/// final bracket. Throws DomainError if g(lo) and g(hi) share a strict sign.
double bisect_root(const ScalarFn& g, double lo, double hi, double x_tol = 1e-14, int max_iter = 400);

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section maximization of a unimodal f on [lo, hi] until the bracket
/// is narrower than x_tol.
ScalarOptimum golden_section_maximize(const ScalarFn& f, double lo, double hi, double x_tol = 1e-8,
                                      int max_iter = 500);

struct BoxOptimum {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Compass (pattern) search maximizing f over the box [lower, upper].
/// Stops when the step falls below `min_step` (in box-normalized units) or
/// the evaluation budget is spent.
BoxOptimum pattern_search_maximize(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, const std::vector<double>& lower,
                                   const std::vector<double>& upper, double initial_step, double min_step,
                                   int budget);

/// Globally adaptive 15-point Gauss-Kronrod on a finite interval; `tol` is an
/// absolute error target.
double integrate_gk(const ScalarFn& f, double a, double b, double tol);

/// Double-exponential (tanh-sinh) quadrature on a finite interval; tolerant
/// of integrable endpoint singularities in the integrand or its derivative.
double integrate_ts(const ScalarFn& f, double a, double b, double tol);

/// Integral of f(a) e^{-a} over [lo, inf), truncated where the weight's tail
/// mass drops below tol / 10, with interior break points honoured.
double integrate_exp_weight(const ScalarFn& f, double lo, std::vector<double> breaks, double tol);

}  // namespace bmdf
