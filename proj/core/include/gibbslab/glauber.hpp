#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/simplex.hpp"
#include "gibbslab/state_space.hpp"

namespace gibbslab {

/// Heat-bath update distribution at a vertex: probability of each new spin
/// value given the current counts and the current spin at the vertex.
/// O(q) per call via count increments.
void update_distribution_counts(const ModelSpec& model,
                                std::span<const std::int64_t> counts,
                                std::int64_t n, int current_spin,
                                std::span<double> out);

std::vector<double> update_distribution(const ModelSpec& model,
                                        const Configuration& config,
                                        std::int64_t vertex);

/// Second-order expansion of the update probabilities around the proportion
/// vector z: g_k(z) + (beta/n) phi_{k,m}(z), m the current spin label.
std::vector<double> update_distribution_expansion(const ModelSpec& model,
                                                  const SimplexPoint& z,
                                                  int current_spin,
                                                  std::int64_t n);

/// One heat-bath step: uniform vertex, resample its spin; counts maintained
/// in O(1).
void glauber_step(const ModelSpec& model, Configuration& config,
                  std::vector<std::int64_t>& counts, RngStream& rng);

/// The dynamics projected onto spin counts: an exact row-stochastic sparse
/// kernel on the lumped state space, with the exact stationary distribution.
struct LumpedKernel {
  std::shared_ptr<const StateSpace> states;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> prob;
  std::vector<double> pi;  // exact Gibbs weights, state-space order
  int q = 0;
  std::int64_t n = 0;

  std::size_t size() const { return states ? states->size() : 0; }
};

/// Row-parallel construction; rows are independent given the Gibbs weights.
LumpedKernel build_lumped_kernel(const ModelSpec& model, std::int64_t n,
                                 int threads = 1);

/// One application of the kernel: out = in * P.
void lumped_step(const LumpedKernel& kernel, std::span<const double> in,
                 std::span<double> out);

struct MixingOptions {
  double epsilon = 0.25;
  /// Default start set: the q pure states plus the most balanced state.
  /// With all_starts the maximum runs over every lumped state.
  bool all_starts = false;
  std::int64_t max_steps = 10'000'000;
};

struct MixingResult {
  std::int64_t t_mix = 0;
  std::vector<double> d_curve;  // d(t) for t = 0, 1, ..., t_mix
};

/// Exact mixing time of the lumped chain: first t with
/// max over starts of || P^t(x, .) - pi ||_TV <= epsilon.
MixingResult exact_mixing_time(const LumpedKernel& kernel,
                               const MixingOptions& options = {});

/// TV distance between the laws of two copies of the lumped chain started at
/// x0 and y0, for t = 0, ..., t_max.
std::vector<double> lumped_tv_between(const LumpedKernel& kernel,
                                      std::size_t x0, std::size_t y0,
                                      std::int64_t t_max);

/// Default start-state indices for mixing analysis.
std::vector<std::size_t> default_start_states(const StateSpace& states);

}  // namespace gibbslab
