// SPDX-License-Identifier: Apache-2.0

#include "bmdf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bmdf/errors.hpp"

namespace bmdf {

double bisect_root(const ScalarFn& g, double lo, double hi, double x_tol, int max_iter) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) throw DomainError("bisect_root: no sign change on bracket");
  for (int i = 0; i < max_iter && hi - lo > x_tol * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ScalarOptimum golden_section_maximize(const ScalarFn& f, double lo, double hi, double x_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++evals;
  }
  ScalarOptimum best;
  best.x = 0.5 * (lo + hi);
  best.value = f(best.x);
  best.evaluations = evals + 1;
  if (fc > best.value) {
    best.x = c;
    best.value = fc;
  }
  if (fd > best.value) {
    best.x = d;
    best.value = fd;
  }
  return best;
}

BoxOptimum pattern_search_maximize(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, const std::vector<double>& lower,
                                   const std::vector<double>& upper, double initial_step, double min_step,
                                   int budget) {
  const std::size_t dim = start.size();
  BoxOptimum best;
  for (std::size_t i = 0; i < dim; ++i) start[i] = std::clamp(start[i], lower[i], upper[i]);
  best.x = start;
  best.value = f(start);
  best.evaluations = 1;
  double step = initial_step;
  while (step >= min_step && best.evaluations < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < dim && best.evaluations < budget; ++i) {
      const double span = upper[i] - lower[i];
      if (span <= 0.0) continue;
      for (const double sign : {+1.0, -1.0}) {
        std::vector<double> trial = best.x;
        trial[i] = std::clamp(trial[i] + sign * step * span, lower[i], upper[i]);
        if (trial[i] == best.x[i]) continue;
        const double v = f(trial);
        ++best.evaluations;
        if (v > best.value) {
          best.value = v;
          best.x = std::move(trial);
          improved = true;
          break;
        }
        if (best.evaluations >= budget) break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

namespace {

struct Segment {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

Segment Kronrod(const ScalarFn& f, double a, double b) {
  Segment s{a, b, 0.0, 0.0};
  // Depth 0: one 15-point rule, error = |Kronrod - Gauss|.
  s.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &s.error);
  return s;
}

// Globally adaptive: bisect the segment with the largest error estimate
// until the summed estimate is below `tol` (absolute).
double AdaptiveSum(const ScalarFn& f, const std::vector<double>& edges, double tol) {
  constexpr std::size_t kMaxSegments = 4000;
  const auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };
  std::vector<Segment> heap;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    heap.push_back(Kronrod(f, edges[i], edges[i + 1]));
    error += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  while (error > tol && !heap.empty() && heap.size() < kMaxSegments) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Segment worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.error == 0.0) {
      // Unsplittable; keep it but stop refining it.
      heap.back().error = 0.0;
      error -= worst.error;
      std::push_heap(heap.begin(), heap.end(), by_error);
      continue;
    }
    heap.pop_back();
    const Segment left = Kronrod(f, worst.a, mid), right = Kronrod(f, mid, worst.b);
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  std::sort(heap.begin(), heap.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  double sum = 0.0;
  for (const Segment& s : heap) sum += s.value;
  return sum;
}

}  // namespace

double integrate_gk(const ScalarFn& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  return AdaptiveSum(f, {a, b}, tol);
}

double integrate_ts(const ScalarFn& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double error = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  return integrator.integrate(f, a, b, tol, &error, &l1, &levels);
}

double integrate_exp_weight(const ScalarFn& f, double lo, std::vector<double> breaks, double tol) {
  const double upper = std::max(lo, std::log(10.0 / tol));
  breaks.push_back(lo);
  breaks.push_back(upper);
  std::erase_if(breaks, [&](double x) { return !(x >= lo && x <= upper); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return AdaptiveSum([&](double a) { return f(a) * std::exp(-a); }, breaks, tol);
}

}  // namespace bmdf
