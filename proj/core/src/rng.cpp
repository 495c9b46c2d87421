#include "gibbslab/rng.hpp"

#include <stdexcept>

namespace gibbslab {

namespace {

constexpr std::uint64_t kMul0 = 0xD2511F53ull;
constexpr std::uint64_t kMul1 = 0xCD9E8D57ull;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = kMul0 * ctr[0];
  const std::uint64_t p1 = kMul1 * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kWeyl0;
  key[1] += kWeyl1;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {}

void RngStream::refill() {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                      static_cast<std::uint32_t>(seed_ >> 32)};
  for (int round = 0; round < 10; ++round) philox_round(ctr, key);
  buf_ = ctr;
  pos_ = 0;
  ++block_;
}

std::uint32_t RngStream::next_u32() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RngStream::next_index(int bound) {
  if (bound < 1) throw std::invalid_argument("next_index: bound must be >= 1");
  const std::uint32_t b = static_cast<std::uint32_t>(bound);
  const std::uint32_t limit = static_cast<std::uint32_t>(-b) % b;  // 2^32 mod b
  for (;;) {
    const std::uint32_t u = next_u32();
    if (u >= limit) return static_cast<int>(u % b);
  }
}

int RngStream::sample(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("sample: empty distribution");
  const double u = next_double();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace gibbslab
