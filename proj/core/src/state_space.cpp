#include "gibbslab/state_space.hpp"

#include <stdexcept>
#include <string>

namespace gibbslab {

namespace {

// C(a, b) under the sizes allowed by the state-space guard; overflow-free
// because results stay below 2^62 for the admissible (q, n).
std::int64_t binom_slow(std::int64_t a, int b) {
  if (b < 0 || b > a) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

}  // namespace

std::int64_t StateSpace::count_states(int q, std::int64_t n) {
  return binom_slow(n + q - 1, q - 1);
}

StateSpace::StateSpace(int q, std::int64_t n) : q_(q), n_(n) {
  if (q < 1) throw std::invalid_argument("StateSpace: q must be >= 1");
  if (n < 1) throw std::invalid_argument("StateSpace: n must be >= 1");
  size_ = count_states(q, n);
  if (size_ > kStateSpaceGuard)
    throw std::invalid_argument("StateSpace: " + std::to_string(size_) +
                                " states exceeds the enumeration guard of " +
                                std::to_string(kStateSpaceGuard));
  const std::int64_t rows = n_ + q_ + 1;
  binom_.assign(static_cast<std::size_t>(rows * (q_ + 1)), 0);
  for (std::int64_t a = 0; a < rows; ++a) {
    binom_[static_cast<std::size_t>(a * (q_ + 1))] = 1;
    for (int b = 1; b <= q_ && b <= a; ++b)
      binom_[static_cast<std::size_t>(a * (q_ + 1) + b)] =
          binom_slow(a, b);
  }
}

std::int64_t StateSpace::binom(std::int64_t a, int b) const {
  if (b < 0 || b > q_ || a < 0 || a > n_ + q_) return binom_slow(a, b);
  if (b > a) return 0;
  return binom_[static_cast<std::size_t>(a * (q_ + 1) + b)];
}

std::size_t StateSpace::index(std::span<const std::int64_t> counts) const {
  if (static_cast<int>(counts.size()) != q_)
    throw std::invalid_argument("StateSpace::index: wrong arity");
  std::int64_t idx = 0;
  std::int64_t remaining = n_;
  for (int j = 0; j + 1 < q_; ++j) {
    const std::int64_t c = counts[static_cast<std::size_t>(j)];
    if (c < 0 || c > remaining)
      throw std::invalid_argument("StateSpace::index: counts out of range");
    // Number of completions with a smaller value at position j: partial
    // hockey-stick sum of compositions of (remaining - a) into q-1-j parts.
    const int parts = q_ - 1 - j;
    idx += binom(remaining + parts, parts) - binom(remaining - c + parts, parts);
    remaining -= c;
  }
  if (counts[static_cast<std::size_t>(q_ - 1)] != remaining)
    throw std::invalid_argument("StateSpace::index: counts do not sum to n");
  return static_cast<std::size_t>(idx);
}

std::vector<std::int64_t> StateSpace::state(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("StateSpace::state: index too large");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(q_), 0);
  std::int64_t idx = static_cast<std::int64_t>(index);
  std::int64_t remaining = n_;
  for (int j = 0; j + 1 < q_; ++j) {
    const int parts = q_ - 1 - j;
    std::int64_t c = 0;
    for (;;) {
      const std::int64_t below = binom(remaining + parts, parts) -
                                 binom(remaining - c + parts, parts);
      const std::int64_t with_c = binom(remaining - c + parts - 1, parts - 1);
      if (idx < below + with_c) {
        idx -= below;
        break;
      }
      ++c;
    }
    counts[static_cast<std::size_t>(j)] = c;
    remaining -= c;
  }
  counts[static_cast<std::size_t>(q_ - 1)] = remaining;
  return counts;
}

}  // namespace gibbslab
