#pragma once

#include <cstdint>
#include <vector>

#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/simplex.hpp"

namespace gibbslab {

/// A pair of coupled chains with maintained counts, Hamming distance and the
/// trial's private random stream.
struct CouplingTrial {
  Configuration sigma;
  Configuration tau;
  std::vector<std::int64_t> counts_sigma;
  std::vector<std::int64_t> counts_tau;
  std::int64_t distance = 0;
  std::int64_t time = 0;
  RngStream rng;

  static CouplingTrial make(Configuration sigma, Configuration tau,
                            RngStream rng);
};

/// Joint greedy update at one shared uniform vertex: matched with probability
/// sum_l min(p_l, q_l), otherwise independent draws from the scaled
/// residuals (whose supports are disjoint, so the chains land on distinct
/// spins). Distance maintained incrementally.
void greedy_coupling_step(const ModelSpec& model, CouplingTrial& trial);

/// Probability that the coupled processes update differently at the chosen
/// vertex: the total variation distance between the two update distributions.
double kappa(const ModelSpec& model, const Configuration& sigma,
             const Configuration& tau, std::int64_t vertex);

/// Exact one-step mean coupling distance under the greedy coupling:
/// d - (1/n) sum_{j in I} (1 - kappa_j) + (1/n) sum_{j not in I} kappa_j.
double expected_onestep_distance(const ModelSpec& model,
                                 const Configuration& sigma,
                                 const Configuration& tau);

enum class CouplingInit { worst_pure_pair, random_pair, equilibrium_vs_pure };

struct CouplingRunOptions {
  std::int64_t cap = 1'000'000'000;
  /// Record E[d(X^t, Y^t)] for t = 0..curve_horizon (0 disables the curve).
  std::int64_t curve_horizon = 0;
  int threads = 1;
};

struct CouplingRunResult {
  std::vector<std::int64_t> coupling_time;  // capped value when censored
  std::vector<std::uint8_t> censored;
  std::vector<double> mean_distance;  // empty unless a horizon was requested
  std::int64_t cap = 0;

  double censored_fraction() const;
  /// Nearest-rank quantile of the coupling times (censored trials rank last).
  std::int64_t quantile(double p) const;
  /// Fraction of trials still uncoupled after t steps.
  double disagree_fraction(std::int64_t t) const;
};

/// Independent greedy-coupled pairs run to coalescence (or the cap), one
/// counter-based stream per trial.
CouplingRunResult run_coupling(const ModelSpec& model, std::int64_t n,
                               CouplingInit init, int trials,
                               std::uint64_t seed,
                               const CouplingRunOptions& options = {});

}  // namespace gibbslab
