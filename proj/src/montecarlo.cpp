// SPDX-License-Identifier: Apache-2.0

#include "bmdf/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace bmdf {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic:
      return "analytic";
    case Provenance::Quadrature:
      return "quadrature";
    case Provenance::MonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

void Moments::merge(const Moments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  const double nt = na + nb;
  const double delta = o.mean - mean;
  mean += delta * nb / nt;
  m2 += o.m2 + delta * delta * na * nb / nt;
  n += o.n;
}

ThroughputEstimate Moments::to_estimate(double se_multiplier) const {
  ThroughputEstimate e;
  e.value = mean;
  e.n = n;
  e.provenance = Provenance::MonteCarlo;
  e.se_multiplier = se_multiplier;
  e.half_width = se_multiplier * std_error();
  return e;
}

void for_each_block(std::size_t num_blocks, unsigned workers, const std::function<void(std::size_t)>& fn) {
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), num_blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < num_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      for (std::size_t b = next.fetch_add(1); b < num_blocks; b = next.fetch_add(1)) fn(b);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = num_blocks;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<FadingDraw> generate_draws(const RngStream& stream, std::size_t n, unsigned workers) {
  std::vector<FadingDraw> out(n);
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  for_each_block(blocks, workers, [&](std::size_t b) {
    const std::size_t hi = std::min(n, (b + 1) * kMcBlockSize);
    for (std::size_t i = b * kMcBlockSize; i < hi; ++i) out[i] = draw_at(stream, i);
  });
  return out;
}

}  // namespace bmdf
