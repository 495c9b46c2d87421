#include "gibbslab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbslab/glauber.hpp"
#include "gibbslab/numeric.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {

CouplingTrial CouplingTrial::make(Configuration sigma, Configuration tau,
                                  RngStream rng) {
  if (sigma.n() != tau.n() || sigma.q() != tau.q())
    throw std::invalid_argument("CouplingTrial: mismatched configurations");
  CouplingTrial trial{std::move(sigma), std::move(tau), {}, {}, 0, 0, rng};
  trial.counts_sigma = empirical_measure(trial.sigma).counts();
  trial.counts_tau = empirical_measure(trial.tau).counts();
  trial.distance = hamming_distance(trial.sigma, trial.tau);
  return trial;
}

namespace {

int sample_normalized(RngStream& rng, std::span<const double> weights,
                      double total) {
  const double u = rng.next_double() * total;
  double acc = 0.0;
  int last = -1;
  for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
    const double w = weights[static_cast<std::size_t>(k)];
    if (w <= 0.0) continue;
    acc += w;
    last = k;
    if (u < acc) return k;
  }
  return last;
}

}  // namespace

void greedy_coupling_step(const ModelSpec& model, CouplingTrial& trial) {
  const std::int64_t n = trial.sigma.n();
  const int q = model.q();
  const std::int64_t j = trial.rng.next_index(static_cast<int>(n));
  const int spin_s = trial.sigma.spin(j);
  const int spin_t = trial.tau.spin(j);

  std::vector<double> p(static_cast<std::size_t>(q));
  std::vector<double> pq(static_cast<std::size_t>(q));
  update_distribution_counts(model, trial.counts_sigma, n, spin_s, p);
  update_distribution_counts(model, trial.counts_tau, n, spin_t, pq);

  std::vector<double> matched(static_cast<std::size_t>(q));
  double match_prob = 0.0;
  for (int k = 0; k < q; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    matched[i] = std::min(p[i], pq[i]);
    match_prob += matched[i];
  }

  int new_s, new_t;
  const double u = trial.rng.next_double();
  if (u < match_prob || 1.0 - match_prob <= 0.0) {
    new_s = new_t = sample_normalized(trial.rng, matched, match_prob);
  } else {
    // min residuals have disjoint support, so the draws cannot collide.
    std::vector<double> rs(static_cast<std::size_t>(q));
    std::vector<double> rt(static_cast<std::size_t>(q));
    double sum_s = 0.0, sum_t = 0.0;
    for (int k = 0; k < q; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      rs[i] = p[i] - matched[i];
      rt[i] = pq[i] - matched[i];
      sum_s += rs[i];
      sum_t += rt[i];
    }
    new_s = sample_normalized(trial.rng, rs, sum_s);
    new_t = sample_normalized(trial.rng, rt, sum_t);
    if (new_s == new_t)
      throw std::logic_error("greedy_coupling_step: residual supports overlap");
  }

  if (new_s != spin_s) {
    --trial.counts_sigma[static_cast<std::size_t>(spin_s)];
    ++trial.counts_sigma[static_cast<std::size_t>(new_s)];
    trial.sigma.set_spin(j, new_s);
  }
  if (new_t != spin_t) {
    --trial.counts_tau[static_cast<std::size_t>(spin_t)];
    ++trial.counts_tau[static_cast<std::size_t>(new_t)];
    trial.tau.set_spin(j, new_t);
  }
  trial.distance += ((new_s != new_t) ? 1 : 0) - ((spin_s != spin_t) ? 1 : 0);
  ++trial.time;
}

double kappa(const ModelSpec& model, const Configuration& sigma,
             const Configuration& tau, std::int64_t vertex) {
  const std::vector<double> p = update_distribution(model, sigma, vertex);
  const std::vector<double> q = update_distribution(model, tau, vertex);
  return tv_distance(p, q);
}

double expected_onestep_distance(const ModelSpec& model,
                                 const Configuration& sigma,
                                 const Configuration& tau) {
  if (sigma.n() != tau.n() || sigma.q() != tau.q())
    throw std::invalid_argument("expected_onestep_distance: mismatched configs");
  const std::int64_t n = sigma.n();
  const int q = model.q();
  const auto counts_s = empirical_measure(sigma).counts();
  const auto counts_t = empirical_measure(tau).counts();
  // The update distribution depends on the vertex only through its spin;
  // precompute one distribution per present spin value on each side.
  std::vector<std::vector<double>> us(static_cast<std::size_t>(q));
  std::vector<std::vector<double>> ut(static_cast<std::size_t>(q));
  for (int m = 0; m < q; ++m) {
    const std::size_t i = static_cast<std::size_t>(m);
    if (counts_s[i] > 0) {
      us[i].resize(static_cast<std::size_t>(q));
      update_distribution_counts(model, counts_s, n, m, us[i]);
    }
    if (counts_t[i] > 0) {
      ut[i].resize(static_cast<std::size_t>(q));
      update_distribution_counts(model, counts_t, n, m, ut[i]);
    }
  }
  const double d = static_cast<double>(hamming_distance(sigma, tau));
  double gain = 0.0, loss = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& pj = us[static_cast<std::size_t>(sigma.spin(j))];
    const auto& qj = ut[static_cast<std::size_t>(tau.spin(j))];
    const double kj = tv_distance(pj, qj);
    if (sigma.spin(j) != tau.spin(j))
      gain += 1.0 - kj;
    else
      loss += kj;
  }
  const double nd = static_cast<double>(n);
  return d - gain / nd + loss / nd;
}

double CouplingRunResult::censored_fraction() const {
  if (censored.empty()) return 0.0;
  double c = 0.0;
  for (auto b : censored) c += b;
  return c / static_cast<double>(censored.size());
}

std::int64_t CouplingRunResult::quantile(double p) const {
  if (coupling_time.empty())
    throw std::logic_error("quantile: no trials");
  std::vector<std::int64_t> sorted = coupling_time;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t count = sorted.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(count)));
  rank = std::clamp<std::size_t>(rank, 1, count);
  return sorted[rank - 1];
}

double CouplingRunResult::disagree_fraction(std::int64_t t) const {
  if (coupling_time.empty()) return 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < coupling_time.size(); ++i)
    if (coupling_time[i] > t || censored[i]) c += 1.0;
  return c / static_cast<double>(coupling_time.size());
}

namespace {

CouplingTrial init_trial(const ModelSpec& model, std::int64_t n,
                         CouplingInit init, RngStream rng) {
  const int q = model.q();
  switch (init) {
    case CouplingInit::worst_pure_pair:
      return CouplingTrial::make(Configuration::constant(n, q, 0),
                                 Configuration::constant(n, q, 1),
                                 std::move(rng));
    case CouplingInit::random_pair: {
      Configuration sigma = Configuration::random_product(n, q, rng);
      Configuration tau = Configuration::random_product(n, q, rng);
      return CouplingTrial::make(std::move(sigma), std::move(tau),
                                 std::move(rng));
    }
    case CouplingInit::equilibrium_vs_pure: {
      Configuration tau = Configuration::constant(n, q, 0);
      if (StateSpace::count_states(q, n) <= 200'000) {
        // Exact draw: counts from the Gibbs weights, then a uniformly random
        // assignment (exchangeability makes this an exact sample).
        const GibbsWeights weights = gibbs_weights(model, n);
        const int idx = rng.sample(weights.prob);
        const auto counts = weights.states->state(static_cast<std::size_t>(idx));
        std::vector<std::int32_t> spins;
        spins.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < q; ++k)
          spins.insert(spins.end(),
                       static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]),
                       static_cast<std::int32_t>(k));
        for (std::int64_t i = n - 1; i > 0; --i) {
          const std::int64_t j = rng.next_index(static_cast<int>(i + 1));
          std::swap(spins[static_cast<std::size_t>(i)],
                    spins[static_cast<std::size_t>(j)]);
        }
        return CouplingTrial::make(Configuration(std::move(spins), q),
                                   std::move(tau), std::move(rng));
      }
      // Large n: approximate equilibrium by a long burn-in run.
      Configuration sigma = Configuration::random_product(n, q, rng);
      std::vector<std::int64_t> counts = empirical_measure(sigma).counts();
      const std::int64_t burn_in =
          20 * n * static_cast<std::int64_t>(std::ceil(std::log(std::max<std::int64_t>(2, n))));
      for (std::int64_t s = 0; s < burn_in; ++s)
        glauber_step(model, sigma, counts, rng);
      return CouplingTrial::make(std::move(sigma), std::move(tau), std::move(rng));
    }
  }
  throw std::logic_error("init_trial: unknown init");
}

}  // namespace

CouplingRunResult run_coupling(const ModelSpec& model, std::int64_t n,
                               CouplingInit init, int trials,
                               std::uint64_t seed,
                               const CouplingRunOptions& options) {
  if (trials < 1) throw std::invalid_argument("run_coupling: trials must be >= 1");
  CouplingRunResult result;
  result.cap = options.cap;
  result.coupling_time.assign(static_cast<std::size_t>(trials), 0);
  result.censored.assign(static_cast<std::size_t>(trials), 0);

  const std::int64_t horizon = options.curve_horizon;
  // Fixed-size trial blocks keep the distance-curve reduction independent of
  // the thread count.
  constexpr int kBlock = 32;
  const int blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_distance(
      static_cast<std::size_t>(blocks));

  parallel_for(static_cast<std::size_t>(blocks), options.threads, [&](std::size_t b) {
    auto& dist_sum = block_distance[b];
    if (horizon > 0) dist_sum.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    const int lo = static_cast<int>(b) * kBlock;
    const int hi = std::min(trials, lo + kBlock);
    for (int trial_idx = lo; trial_idx < hi; ++trial_idx) {
      CouplingTrial trial = init_trial(
          model, n, init, RngStream(seed, static_cast<std::uint64_t>(trial_idx)));
      if (horizon > 0) dist_sum[0] += static_cast<double>(trial.distance);
      while (trial.distance > 0 && trial.time < options.cap) {
        greedy_coupling_step(model, trial);
        if (horizon > 0 && trial.time <= horizon)
          dist_sum[static_cast<std::size_t>(trial.time)] +=
              static_cast<double>(trial.distance);
      }
      const std::size_t i = static_cast<std::size_t>(trial_idx);
      result.coupling_time[i] = trial.time;
      result.censored[i] = (trial.distance > 0) ? 1 : 0;
    }
  });

  if (horizon > 0) {
    result.mean_distance.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (const auto& partial : block_distance)
      for (std::size_t t = 0; t < partial.size(); ++t)
        result.mean_distance[t] += partial[t];
    for (double& v : result.mean_distance) v /= static_cast<double>(trials);
  }
  return result;
}

}  // namespace gibbslab
