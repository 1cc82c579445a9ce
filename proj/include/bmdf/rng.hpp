// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace bmdf {

/// Philox4x64-10 block function (Salmon et al., SC'11).
///
/// Maps a 256-bit counter and a 128-bit key to 256 pseudo-random bits. Being
/// a pure function, any sample of any stream can be regenerated in O(1).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// 53-bit uniform double in (0, 1]; never returns 0 so -log(u) is finite.
inline double to_unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// 53-bit uniform double in [0, 1).
inline double to_unit_closed_open(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A reproducible random stream keyed by (seed, stream id).
///
/// Value type: copying a stream forks it. substream() derives a statistically
/// independent child keyed deterministically by the child index, so any
/// partition of work over substreams reproduces bit-identically no matter how
/// many workers consume it.
class RngStream {
 public:
  constexpr RngStream() = default;
  constexpr explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  RngStream substream(std::uint64_t index) const;

  /// The 256-bit block at position `index` of this stream.
  std::array<std::uint64_t, 4> block(std::uint64_t index) const {
    return philox4x64({index, 0, 0, 0}, {seed_, stream_});
  }

  /// Sequential draw: the next block, advancing the internal counter.
  std::array<std::uint64_t, 4> next() { return block(counter_++); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t position() const { return counter_; }
  void seek(std::uint64_t position) { counter_ = position; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace bmdf
