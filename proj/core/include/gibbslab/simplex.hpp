#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gibbslab/rng.hpp"

namespace gibbslab {

/// Absolute tolerance on the coordinate sum of a probability vector. Inputs
/// outside it are rejected rather than renormalized.
inline constexpr double kSimplexTol = 1e-12;

/// A point of the continuous probability simplex over q spin values.
/// Immutable after construction.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> coords);

  static SimplexPoint uniform(int q);
  static SimplexPoint basis(int q, int k);

  int q() const { return static_cast<int>(coords_.size()); }
  double operator[](int k) const { return coords_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& coords() const { return coords_; }
  std::span<const double> span() const { return coords_; }

  bool operator==(const SimplexPoint& o) const { return coords_ == o.coords_; }

 private:
  std::vector<double> coords_;
};

double l1_distance(const SimplexPoint& a, const SimplexPoint& b);

/// Integer spin-count vector: the canonical state of the lumped chain.
/// counts sum to n. Immutable after construction.
class LatticePoint {
 public:
  LatticePoint(std::vector<std::int64_t> counts, std::int64_t n);
  static LatticePoint from_counts(std::vector<std::int64_t> counts);

  int q() const { return static_cast<int>(counts_.size()); }
  std::int64_t n() const { return n_; }
  std::int64_t count(int k) const { return counts_[static_cast<std::size_t>(k)]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  SimplexPoint to_simplex() const;

  bool operator==(const LatticePoint& o) const = default;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t n_;
};

/// A length-n assignment of spin labels. Labels are 0-based internally
/// (0..q-1). Mutable: the dynamics update spins in place.
class Configuration {
 public:
  Configuration(std::vector<std::int32_t> spins, int q);

  static Configuration constant(std::int64_t n, int q, int spin);
  static Configuration random_product(std::int64_t n, int q, RngStream& rng);

  std::int64_t n() const { return static_cast<std::int64_t>(spins_.size()); }
  int q() const { return q_; }
  int spin(std::int64_t i) const { return spins_[static_cast<std::size_t>(i)]; }
  void set_spin(std::int64_t i, int s);
  const std::vector<std::int32_t>& spins() const { return spins_; }

 private:
  std::vector<std::int32_t> spins_;
  int q_;
};

std::int64_t hamming_distance(const Configuration& a, const Configuration& b);

/// Spin-count vector of a configuration.
LatticePoint empirical_measure(const Configuration& config);

}  // namespace gibbslab
