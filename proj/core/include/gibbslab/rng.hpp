#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace gibbslab {

/// Counter-based random stream (Philox4x32-10). A stream is fully determined
/// by (seed, stream_id): replaying either reproduces the exact bit sequence,
/// and distinct stream_ids index disjoint counter ranges, so per-trial streams
/// can be consumed in parallel without coordination.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  /// Uniform index in {0, ..., bound-1}, bound >= 1. Rejection sampled.
  int next_index(int bound);

  /// Categorical draw by CDF inversion over a probability vector.
  int sample(std::span<const double> probs);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace gibbslab
