#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gibbslab/simplex.hpp"

namespace gibbslab {

/// Hard cap on enumerable lumped state spaces: C(n+q-1, q-1) states.
inline constexpr std::int64_t kStateSpaceGuard = 5'000'000;

/// Lexicographic enumeration of all spin-count vectors (c_0, ..., c_{q-1})
/// with nonnegative entries summing to n. Index 0 is (0, ..., 0, n).
class StateSpace {
 public:
  StateSpace(int q, std::int64_t n);

  int q() const { return q_; }
  std::int64_t n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(size_); }

  std::vector<std::int64_t> state(std::size_t index) const;
  std::size_t index(std::span<const std::int64_t> counts) const;

  /// Number of count vectors for (q, n), without constructing the space.
  static std::int64_t count_states(int q, std::int64_t n);

 private:
  // binom_[a][b] = C(a, b) for a <= n + q, b <= q.
  std::int64_t binom(std::int64_t a, int b) const;

  int q_;
  std::int64_t n_;
  std::int64_t size_;
  std::vector<std::int64_t> binom_;  // row-major (n + q + 1) x (q + 1)
};

}  // namespace gibbslab
