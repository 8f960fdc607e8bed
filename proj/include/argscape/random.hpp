#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace argscape {

// Counter-based random streams.
//
// A RandomSource is identified by (master_seed, stream_index). Draws come from
// Philox4x32-10 keyed by the master seed, with the stream index in the upper
// half of the 128-bit counter and the draw number in the lower half, so
// distinct streams never share a counter block and any stream can be
// recreated from its two integers alone.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  RandomSource(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Child stream with an index mixed from this stream's index and `child`.
  /// Used to give sub-tasks of one replicate their own stream.
  RandomSource derive(std::uint64_t child) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Exponential(rate) by inverse CDF. rate must be positive.
  double exponential(double rate);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);
  bool coin();

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

}  // namespace argscape
