// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/two_layer.hpp"

namespace bmdf {
namespace {

constexpr double kTieTolerance = 1e-9;

double SafeUncorrelated(const ChannelParams& params, double alpha, double beta, double r1, double r2, double tol) {
  return average_throughput_uncorrelated(params, PowerSplit(alpha, beta), {r1, r2}, tol).value;
}

bool Better(const TwoLayerOptimum& cand, const TwoLayerOptimum& best) {
  if (cand.value > best.value + kTieTolerance) return true;
  if (cand.value < best.value - kTieTolerance) return false;
  if (cand.corr.rho1 != best.corr.rho1) return cand.corr.rho1 < best.corr.rho1;
  if (cand.corr.rho2 != best.corr.rho2) return cand.corr.rho2 < best.corr.rho2;
  return cand.rates.r2 < best.rates.r2;
}

TwoLayerOptimum OptimizeUncorrelated(const ChannelParams& params, const TwoLayerSearchOptions& opt) {
  const double p = params.total_power();
  const double r_hi = std::log1p(1e3 * p);
  const std::vector<double> lower{opt.fixed_alpha.value_or(0.0), opt.fixed_beta.value_or(0.0), 0.0, 0.0};
  const std::vector<double> upper{opt.fixed_alpha.value_or(1.0), opt.fixed_beta.value_or(1.0), r_hi, r_hi};

  const auto objective = [&](const std::vector<double>& x) {
    return SafeUncorrelated(params, x[0], x[1], x[2], x[3], opt.tol);
  };

  std::vector<std::vector<double>> starts;
  const RateOptimum single = maximize_throughput(params, RhoMode::RhoZero);
  starts.push_back({1.0, 1.0, single.rate, 0.0});
  const SisoLayering siso = optimize_siso_layering(p, 2);
  starts.push_back({siso.splits[0], siso.splits[0], siso.rates[0], siso.rates[1]});
  const SisoLayering siso_src = optimize_siso_layering(params.p_s, 2);
  starts.push_back({siso_src.splits[0], siso_src.splits[0], siso_src.rates[0], siso_src.rates[1]});
  starts.push_back({0.5, 0.5, 0.5 * single.rate, 0.5 * single.rate});

  const int per_start = std::max(1, opt.budget / static_cast<int>(starts.size()));
  TwoLayerOptimum best;
  best.value = -1.0;
  int evaluations = 0;
  for (const auto& s : starts) {
    const BoxOptimum found = pattern_search_maximize(objective, s, lower, upper, 0.05, 1e-7, per_start);
    evaluations += found.evaluations;
    TwoLayerOptimum cand;
    cand.split = PowerSplit(found.x[0], found.x[1]);
    cand.rates = {found.x[2], found.x[3]};
    cand.value = found.value;
    if (best.value < 0.0 || Better(cand, best)) best = cand;
  }
  best.evaluations = evaluations;
  return best;
}

}  // namespace

TwoLayerOptimum optimize_two_layer_throughput(const ChannelParams& params, TwoLayerMode mode,
                                              const TwoLayerSearchOptions& options) {
  params.validate();
  if (options.budget < 1) throw DomainError("optimize_two_layer_throughput: budget must be >= 1");
  TwoLayerOptimum best = OptimizeUncorrelated(params, options);
  if (mode == TwoLayerMode::UncorrelatedAnalytic) return best;

  // Correlated refinement: same split and rates, common random numbers over
  // the feasible part of the (rho1, rho2) grid.
  const std::vector<FadingDraw> draws = generate_draws(RngStream(options.mc.seed), options.mc.samples,
                                                       options.mc.workers);
  const int g = std::max(2, options.rho_grid);
  double cap = 1.0;
  try {
    cap = rho2_cap(params, best.split, best.rates.r2);
  } catch (const InfeasibleRate&) {
    cap = 0.0;
  }
  TwoLayerOptimum mc_best;
  mc_best.value = -1.0;
  int evaluations = best.evaluations;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const CorrelationPair corr{static_cast<double>(i) / (g - 1), static_cast<double>(j) / (g - 1)};
      if (corr.rho2 > cap) continue;
      const ConicClassification cls = classify_conic(params, best.split, best.rates, corr);
      if (!*cls.probe_feasible) continue;
      const TwoLayerCounts counts =
          simulate_two_layer_over(draws, params, best.split, corr, best.rates, options.mc.workers);
      ++evaluations;
      TwoLayerOptimum cand = best;
      cand.corr = corr;
      cand.value = counts.throughput(best.rates);
      if (mc_best.value < 0.0 || Better(cand, mc_best)) mc_best = cand;
    }
  }
  if (mc_best.value < 0.0) {
    mc_best = best;
    mc_best.value = 0.0;
  }
  mc_best.evaluations = evaluations;
  return mc_best;
}

ObliviousTwoLayer oblivious_two_layer(const ChannelParams& params, bool optimize_beta, double tol) {
  params.validate();
  ObliviousTwoLayer out;
  out.siso = optimize_siso_layering(params.p_s, 2);
  const double alpha = out.siso.splits[0];
  out.rates = {out.siso.rates[0], out.siso.rates[1]};
  out.direct = out.siso.objective;
  const auto value = [&](double beta) {
    return average_throughput_uncorrelated(params, PowerSplit(alpha, beta), out.rates, tol).value;
  };
  double beta = alpha;
  if (optimize_beta) {
    // Coarse scan, then golden section around the best grid point.
    constexpr int kGrid = 40;
    int best_i = 0;
    double best_v = -1.0;
    for (int i = 0; i <= kGrid; ++i) {
      const double v = value(static_cast<double>(i) / kGrid);
      if (v > best_v) {
        best_v = v;
        best_i = i;
      }
    }
    const double lo = std::max(0.0, (best_i - 1.0) / kGrid), hi = std::min(1.0, (best_i + 1.0) / kGrid);
    const ScalarOptimum refined = golden_section_maximize(value, lo, hi, 1e-9);
    beta = refined.value >= best_v ? refined.x : static_cast<double>(best_i) / kGrid;
  }
  out.split = PowerSplit(alpha, beta);
  out.bm = value(beta);
  return out;
}

}  // namespace bmdf
