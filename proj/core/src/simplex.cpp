#include "gibbslab/simplex.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gibbslab/numeric.hpp"

namespace gibbslab {

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("SimplexPoint: empty vector");
  double sum = 0.0;
  for (double c : coords_) {
    if (!std::isfinite(c) || c < 0.0)
      throw std::invalid_argument("SimplexPoint: coordinates must be finite and >= 0");
    sum += c;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("SimplexPoint: coordinates sum to " +
                                format_g17(sum) + ", outside tolerance");
}

SimplexPoint SimplexPoint::uniform(int q) {
  if (q < 1) throw std::invalid_argument("SimplexPoint::uniform: q must be >= 1");
  return SimplexPoint(std::vector<double>(static_cast<std::size_t>(q), 1.0 / q));
}

SimplexPoint SimplexPoint::basis(int q, int k) {
  if (q < 1 || k < 0 || k >= q)
    throw std::invalid_argument("SimplexPoint::basis: bad (q, k)");
  std::vector<double> c(static_cast<std::size_t>(q), 0.0);
  c[static_cast<std::size_t>(k)] = 1.0;
  return SimplexPoint(std::move(c));
}

double l1_distance(const SimplexPoint& a, const SimplexPoint& b) {
  return l1_diff(a.span(), b.span());
}

LatticePoint::LatticePoint(std::vector<std::int64_t> counts, std::int64_t n)
    : counts_(std::move(counts)), n_(n) {
  if (counts_.empty()) throw std::invalid_argument("LatticePoint: empty counts");
  if (n_ < 1) throw std::invalid_argument("LatticePoint: n must be positive");
  std::int64_t sum = 0;
  for (std::int64_t c : counts_) {
    if (c < 0) throw std::invalid_argument("LatticePoint: negative count");
    sum += c;
  }
  if (sum != n_)
    throw std::invalid_argument("LatticePoint: counts sum to " +
                                std::to_string(sum) + ", expected n = " +
                                std::to_string(n_));
}

LatticePoint LatticePoint::from_counts(std::vector<std::int64_t> counts) {
  std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  return LatticePoint(std::move(counts), n);
}

SimplexPoint LatticePoint::to_simplex() const {
  std::vector<double> c(counts_.size());
  for (std::size_t k = 0; k < counts_.size(); ++k)
    c[k] = static_cast<double>(counts_[k]) / static_cast<double>(n_);
  return SimplexPoint(std::move(c));
}

Configuration::Configuration(std::vector<std::int32_t> spins, int q)
    : spins_(std::move(spins)), q_(q) {
  if (q_ < 2) throw std::invalid_argument("Configuration: q must be >= 2");
  if (spins_.empty()) throw std::invalid_argument("Configuration: empty spins");
  for (std::int32_t s : spins_)
    if (s < 0 || s >= q_)
      throw std::invalid_argument("Configuration: spin label out of range");
}

Configuration Configuration::constant(std::int64_t n, int q, int spin) {
  if (n < 1) throw std::invalid_argument("Configuration::constant: n must be >= 1");
  return Configuration(
      std::vector<std::int32_t>(static_cast<std::size_t>(n),
                                static_cast<std::int32_t>(spin)),
      q);
}

Configuration Configuration::random_product(std::int64_t n, int q, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("Configuration::random_product: n must be >= 1");
  std::vector<std::int32_t> spins(static_cast<std::size_t>(n));
  for (auto& s : spins) s = static_cast<std::int32_t>(rng.next_index(q));
  return Configuration(std::move(spins), q);
}

void Configuration::set_spin(std::int64_t i, int s) {
  if (s < 0 || s >= q_) throw std::invalid_argument("set_spin: label out of range");
  spins_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(s);
}

std::int64_t hamming_distance(const Configuration& a, const Configuration& b) {
  if (a.n() != b.n() || a.q() != b.q())
    throw std::invalid_argument("hamming_distance: mismatched configurations");
  std::int64_t d = 0;
  for (std::int64_t i = 0; i < a.n(); ++i) d += (a.spin(i) != b.spin(i)) ? 1 : 0;
  return d;
}

LatticePoint empirical_measure(const Configuration& config) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(config.q()), 0);
  for (std::int64_t i = 0; i < config.n(); ++i)
    ++counts[static_cast<std::size_t>(config.spin(i))];
  return LatticePoint(std::move(counts), config.n());
}

}  // namespace gibbslab
