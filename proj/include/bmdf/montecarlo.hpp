// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bmdf/channel.hpp"
#include "bmdf/rng.hpp"

namespace bmdf {

enum class Provenance { Analytic, Quadrature, MonteCarlo };

const char* to_string(Provenance p);

/// A computed quantity with its provenance. For Monte Carlo values the
/// half-width is `se_multiplier` standard errors; otherwise it is zero.
struct ThroughputEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
  Provenance provenance = Provenance::Analytic;
  double se_multiplier = 0.0;

  static ThroughputEstimate exact(double value, Provenance provenance) {
    return {value, 0.0, 0, provenance, 0.0};
  }
  double std_error() const { return se_multiplier > 0.0 ? half_width / se_multiplier : 0.0; }
  bool covers(double x) const { return std::abs(x - value) <= half_width; }
};

inline constexpr double kDefaultSeMultiplier = 4.0;
inline constexpr std::uint64_t kDefaultSeed = 0x5EEDB0D1F00DULL;

struct McConfig {
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 1'000'000;
  unsigned workers = 1;
  double se_multiplier = kDefaultSeMultiplier;
};

/// Running mean and centred second moment (Welford / Chan merge).
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Moments& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
  ThroughputEstimate to_estimate(double se_multiplier) const;
};

/// Number of consecutive draws summed before merging. Blocks are merged in
/// index order, so results do not depend on how blocks map to workers.
inline constexpr std::size_t kMcBlockSize = std::size_t{1} << 14;

/// Runs fn(block_index) for every block on up to `workers` threads.
void for_each_block(std::size_t num_blocks, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Draw `index` of `stream`; independent of any other draw.
inline FadingDraw draw_at(const RngStream& stream, std::uint64_t index) {
  return fading_from_block(stream.block(index));
}

/// Accumulates K statistics of payoff(draw) over `cfg.samples` draws.
template <std::size_t K, class Payoff>
std::array<Moments, K> accumulate(const McConfig& cfg, const RngStream& stream, Payoff&& payoff) {
  const std::size_t n = cfg.samples;
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::array<Moments, K>> partial(blocks);
  for_each_block(blocks, cfg.workers, [&](std::size_t b) {
    const std::size_t lo = b * kMcBlockSize;
    const std::size_t hi = std::min(n, lo + kMcBlockSize);
    auto& acc = partial[b];
    for (std::size_t i = lo; i < hi; ++i) {
      const std::array<double, K> v = payoff(draw_at(stream, i));
      for (std::size_t k = 0; k < K; ++k) acc[k].add(v[k]);
    }
  });
  std::array<Moments, K> total{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k].merge(p[k]);
  return total;
}

/// Same as accumulate() over a fixed, pre-drawn sample (common random numbers).
template <std::size_t K, class Payoff>
std::array<Moments, K> accumulate_over(std::span<const FadingDraw> draws, unsigned workers, Payoff&& payoff) {
  const std::size_t n = draws.size();
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::array<Moments, K>> partial(blocks);
  for_each_block(blocks, workers, [&](std::size_t b) {
    const std::size_t lo = b * kMcBlockSize;
    const std::size_t hi = std::min(n, lo + kMcBlockSize);
    auto& acc = partial[b];
    for (std::size_t i = lo; i < hi; ++i) {
      const std::array<double, K> v = payoff(draws[i]);
      for (std::size_t k = 0; k < K; ++k) acc[k].add(v[k]);
    }
  });
  std::array<Moments, K> total{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k].merge(p[k]);
  return total;
}

/// Sample mean of payoff(draw) with a standard-error half-width.
template <class Payoff>
ThroughputEstimate estimate(Payoff&& payoff, const McConfig& cfg) {
  const auto m = accumulate<1>(cfg, RngStream(cfg.seed),
                               [&](const FadingDraw& d) { return std::array<double, 1>{payoff(d)}; });
  return m[0].to_estimate(cfg.se_multiplier);
}

/// Materializes draws [0, n) of `stream` for reuse across candidates.
std::vector<FadingDraw> generate_draws(const RngStream& stream, std::size_t n, unsigned workers = 1);

}  // namespace bmdf
