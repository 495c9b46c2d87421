#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "gibbslab/equilibrium.hpp"
#include "gibbslab/glauber.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/numeric.hpp"
#include "test_util.hpp"

using namespace gibbslab;

TEST_CASE("update_distribution fixed values") {
  // n = 1: every candidate state is a basis vector, so the update is uniform
  const ModelSpec m3 = ModelSpec::gcwp(3, 2.0, 1.7);
  const Configuration single({1}, 3);
  for (double p : update_distribution(m3, single, 0))
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // beta = 0 is uniform regardless of the configuration
  const ModelSpec m0 = ModelSpec::gcwp(3, 2.0, 0.0);
  const Configuration c({0, 1, 1, 2, 2, 2}, 3);
  for (double p : update_distribution(m0, c, 3))
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // n=2, q=2, r=2, both spins on the first value, beta = 1
  const ModelSpec m2 = ModelSpec::gcwp(2, 2.0, 1.0);
  const Configuration pure({0, 0}, 2);
  const auto probs = update_distribution(m2, pure, 0);
  CHECK(probs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-14));
  CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("update_distribution sums to 1 and is label equivariant") {
  RngStream rng(31, 0);
  const ModelSpec m = ModelSpec::gcwp(3, 2.5, 1.3);
  for (int trial = 0; trial < 30; ++trial) {
    const Configuration c = Configuration::random_product(12, 3, rng);
    const int vertex = rng.next_index(12);
    const auto p = update_distribution(m, c, vertex);
    CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) < 1e-12);

    // relabel spins by a cyclic permutation; probabilities must follow
    std::vector<std::int32_t> relabeled(12);
    for (int i = 0; i < 12; ++i)
      relabeled[static_cast<std::size_t>(i)] =
          static_cast<std::int32_t>((c.spin(i) + 1) % 3);
    const auto pp = update_distribution(m, Configuration(relabeled, 3), vertex);
    for (int k = 0; k < 3; ++k)
      CHECK(pp[static_cast<std::size_t>((k + 1) % 3)] ==
            doctest::Approx(p[static_cast<std::size_t>(k)]).epsilon(1e-13));
  }
}

TEST_CASE("expansion is exact at beta = 0 and tends to g as n grows") {
  const ModelSpec m0 = ModelSpec::gcwp(3, 2.0, 0.0);
  const SimplexPoint z({0.5, 0.3, 0.2});
  const auto e0 = update_distribution_expansion(m0, z, 0, 10);
  for (double p : e0) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.0);
  const SimplexPoint g = g_function(m, z);
  const auto big = update_distribution_expansion(m, z, 1, 1'000'000'000);
  for (int k = 0; k < 3; ++k)
    CHECK(big[static_cast<std::size_t>(k)] == doctest::Approx(g[k]).epsilon(1e-8));
}

TEST_CASE("expansion residual decays at the n^-2 rate") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.0);
  const std::vector<std::int64_t> base{25, 15, 10};  // z = (0.5, 0.3, 0.2) at n=50
  const int current = 0;
  std::vector<double> log_n, log_err;
  for (std::int64_t scale : {1, 2, 4, 8}) {
    const std::int64_t n = 50 * scale;
    std::vector<std::int64_t> counts(3);
    for (int k = 0; k < 3; ++k)
      counts[static_cast<std::size_t>(k)] =
          base[static_cast<std::size_t>(k)] * scale;
    std::vector<double> exact(3);
    update_distribution_counts(m, counts, n, current, exact);
    const auto approx = update_distribution_expansion(
        m, LatticePoint(counts, n).to_simplex(), current, n);
    double err = 0.0;
    for (int k = 0; k < 3; ++k)
      err = std::max(err, std::abs(exact[static_cast<std::size_t>(k)] -
                                   approx[static_cast<std::size_t>(k)]));
    log_n.push_back(std::log(static_cast<double>(n)));
    log_err.push_back(std::log(err));
  }
  const LinearFit fit = fit_line(log_n, log_err);
  CHECK(fit.slope > -2.3);
  CHECK(fit.slope < -1.7);
}

TEST_CASE("expansion residual times n^2 stays bounded") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.0);
  const std::vector<std::int64_t> base{5, 3, 2};  // z = (0.5, 0.3, 0.2)
  double first_scaled = 0.0;
  for (std::int64_t n = 50; n <= 800; n *= 2) {
    std::vector<std::int64_t> counts(3);
    for (int k = 0; k < 3; ++k)
      counts[static_cast<std::size_t>(k)] = base[static_cast<std::size_t>(k)] * n / 10;
    std::vector<double> exact(3);
    update_distribution_counts(m, counts, n, 1, exact);
    const auto approx = update_distribution_expansion(
        m, LatticePoint(counts, n).to_simplex(), 1, n);
    double err = 0.0;
    for (int k = 0; k < 3; ++k)
      err = std::max(err, std::abs(exact[static_cast<std::size_t>(k)] -
                                   approx[static_cast<std::size_t>(k)]));
    const double scaled = err * static_cast<double>(n) * static_cast<double>(n);
    if (first_scaled == 0.0) first_scaled = scaled;
    CHECK(scaled < 10.0 * first_scaled);
  }
}

TEST_CASE("glauber_step keeps counts consistent and is deterministic") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.2);
  RngStream init(41, 0);
  Configuration c = Configuration::random_product(30, 3, init);
  std::vector<std::int64_t> counts = empirical_measure(c).counts();
  RngStream rng(42, 5);
  for (int t = 0; t < 2000; ++t) {
    glauber_step(m, c, counts, rng);
    std::int64_t total = 0;
    for (auto x : counts) total += x;
    REQUIRE(total == 30);
  }
  CHECK(counts == empirical_measure(c).counts());

  // replaying the same stream reproduces the trajectory bit for bit
  RngStream init2(41, 0);
  Configuration c2 = Configuration::random_product(30, 3, init2);
  std::vector<std::int64_t> counts2 = empirical_measure(c2).counts();
  RngStream rng2(42, 5);
  for (int t = 0; t < 2000; ++t) glauber_step(m, c2, counts2, rng2);
  CHECK(c.spins() == c2.spins());
}

TEST_CASE("glauber_step at beta = 0 converges to the product measure") {
  const ModelSpec m = ModelSpec::gcwp(2, 2.0, 0.0);
  const std::int64_t n = 10;
  RngStream rng(7, 0);
  Configuration c = Configuration::constant(n, 2, 0);
  std::vector<std::int64_t> counts = empirical_measure(c).counts();
  const GibbsWeights exact = gibbs_weights(m, n);  // binomial at beta = 0
  std::vector<double> occupancy(exact.prob.size(), 0.0);
  const int steps = 1'000'000;
  const int burn_in = 10'000;
  for (int t = 0; t < steps + burn_in; ++t) {
    glauber_step(m, c, counts, rng);
    if (t >= burn_in) occupancy[exact.states->index(counts)] += 1.0;
  }
  // conservative effective sample size: one full sweep decorrelates
  const double ess = static_cast<double>(steps) / (2.0 * static_cast<double>(n));
  double chi2 = 0.0;
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    const double emp = occupancy[i] / steps;
    chi2 += (emp - exact.prob[i]) * (emp - exact.prob[i]) / exact.prob[i];
  }
  chi2 *= ess;
  CHECK(chi2 < 40.0);  // chi-square(10): 99.99th percentile is ~35.6
}

namespace {

// Brute-force oracle: the full configuration chain on q^n states.
struct FullChain {
  std::vector<std::vector<double>> matrix;
  int q;
  std::int64_t n;

  static FullChain build(const ModelSpec& model, std::int64_t n) {
    const int q = model.q();
    std::size_t total = 1;
    for (std::int64_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(q);
    FullChain chain{{}, q, n};
    chain.matrix.assign(total, std::vector<double>(total, 0.0));
    for (std::size_t s = 0; s < total; ++s) {
      std::vector<std::int32_t> spins(static_cast<std::size_t>(n));
      std::size_t v = s;
      for (std::int64_t i = 0; i < n; ++i) {
        spins[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(v % q);
        v /= static_cast<std::size_t>(q);
      }
      const Configuration config(spins, q);
      for (std::int64_t vertex = 0; vertex < n; ++vertex) {
        const auto probs = update_distribution(model, config, vertex);
        std::size_t stride = 1;
        for (std::int64_t i = 0; i < vertex; ++i) stride *= static_cast<std::size_t>(q);
        for (int k = 0; k < q; ++k) {
          std::size_t target = s;
          target -= stride * static_cast<std::size_t>(
                                 spins[static_cast<std::size_t>(vertex)]);
          target += stride * static_cast<std::size_t>(k);
          chain.matrix[s][target] +=
              probs[static_cast<std::size_t>(k)] / static_cast<double>(n);
        }
      }
    }
    return chain;
  }
};

}  // namespace

TEST_CASE("lumped kernel rows are stochastic with local support") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.4);
  const LumpedKernel kernel = build_lumped_kernel(m, 9);
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    double sum = 0.0;
    const auto from = kernel.states->state(x);
    for (std::size_t e = kernel.row_ptr[x]; e < kernel.row_ptr[x + 1]; ++e) {
      sum += kernel.prob[e];
      const auto to = kernel.states->state(kernel.col[e]);
      std::int64_t moved = 0;
      for (int k = 0; k < 3; ++k)
        moved += std::abs(from[static_cast<std::size_t>(k)] -
                          to[static_cast<std::size_t>(k)]);
      CHECK(moved <= 2);  // at most one unit moves between two coordinates
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("lumped kernel at n = 1 is the uniform update") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 2.2);
  const LumpedKernel kernel = build_lumped_kernel(m, 1);
  REQUIRE(kernel.size() == 3);
  for (std::size_t x = 0; x < 3; ++x) {
    REQUIRE(kernel.row_ptr[x + 1] - kernel.row_ptr[x] == 3);
    for (std::size_t e = kernel.row_ptr[x]; e < kernel.row_ptr[x + 1]; ++e)
      CHECK(kernel.prob[e] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("lumped kernel at beta = 0 is the uniform resample chain") {
  const ModelSpec m = ModelSpec::gcwp(2, 2.0, 0.0);
  const std::int64_t n = 6;
  const LumpedKernel kernel = build_lumped_kernel(m, n);
  const auto idx = [&](std::int64_t c0) {
    return kernel.states->index(std::vector<std::int64_t>{c0, n - c0});
  };
  // from counts (4, 2): one of the 4 spins flips with probability 1/2 each
  const std::size_t x = idx(4);
  for (std::size_t e = kernel.row_ptr[x]; e < kernel.row_ptr[x + 1]; ++e) {
    if (kernel.col[e] == idx(3))
      CHECK(kernel.prob[e] == doctest::Approx(4.0 / 12.0).epsilon(1e-14));
    if (kernel.col[e] == idx(5))
      CHECK(kernel.prob[e] == doctest::Approx(2.0 / 12.0).epsilon(1e-14));
  }
  // stationary distribution is the binomial
  std::vector<double> out(kernel.size());
  lumped_step(kernel, kernel.pi, out);
  CHECK(l1_diff(out, kernel.pi) < 1e-12);
}

TEST_CASE("lumped kernel matches the full-chain aggregation oracle") {
  const ModelSpec m = ModelSpec::gcwp(2, 2.0, 1.0);
  const FullChain full = FullChain::build(m, 2);
  const LumpedKernel kernel = build_lumped_kernel(m, 2);
  const auto counts_of = [&](std::size_t s) {
    std::vector<std::int64_t> counts(2, 0);
    ++counts[s % 2];
    ++counts[(s / 2) % 2];
    return counts;
  };
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t row = kernel.states->index(counts_of(s));
    std::map<std::size_t, double> lumped_row;
    for (std::size_t t = 0; t < 4; ++t)
      lumped_row[kernel.states->index(counts_of(t))] += full.matrix[s][t];
    for (std::size_t e = kernel.row_ptr[row]; e < kernel.row_ptr[row + 1]; ++e)
      CHECK(kernel.prob[e] ==
            doctest::Approx(lumped_row[kernel.col[e]]).epsilon(1e-13));
  }
}

TEST_CASE("larger full-chain oracle: n = 3, q = 2") {
  const ModelSpec m = ModelSpec::gcwp(2, 2.0, 1.6);
  const FullChain full = FullChain::build(m, 3);
  const LumpedKernel kernel = build_lumped_kernel(m, 3);
  const auto counts_of = [&](std::size_t s) {
    std::vector<std::int64_t> counts(2, 0);
    for (int i = 0; i < 3; ++i) ++counts[(s >> i) & 1u];
    return counts;
  };
  for (std::size_t s = 0; s < 8; ++s) {
    const std::size_t row = kernel.states->index(counts_of(s));
    std::map<std::size_t, double> lumped_row;
    for (std::size_t t = 0; t < 8; ++t)
      lumped_row[kernel.states->index(counts_of(t))] += full.matrix[s][t];
    for (std::size_t e = kernel.row_ptr[row]; e < kernel.row_ptr[row + 1]; ++e)
      CHECK(kernel.prob[e] ==
            doctest::Approx(lumped_row[kernel.col[e]]).epsilon(1e-13));
  }
}

TEST_CASE("stationarity and reversibility of the lumped kernel") {
  for (double beta : {1.0, 3.3}) {
    const ModelSpec m = ModelSpec::gcwp(3, 2.0, beta);
    const LumpedKernel kernel = build_lumped_kernel(m, 12);
    std::vector<double> out(kernel.size());
    lumped_step(kernel, kernel.pi, out);
    CHECK(l1_diff(out, kernel.pi) < 1e-10);

    double worst = 0.0;
    for (std::size_t x = 0; x < kernel.size(); ++x) {
      for (std::size_t e = kernel.row_ptr[x]; e < kernel.row_ptr[x + 1]; ++e) {
        const std::size_t y = kernel.col[e];
        if (y <= x) continue;
        double back = 0.0;
        for (std::size_t f = kernel.row_ptr[y]; f < kernel.row_ptr[y + 1]; ++f)
          if (kernel.col[f] == x) back = kernel.prob[f];
        worst = std::max(worst, std::abs(kernel.pi[x] * kernel.prob[e] -
                                         kernel.pi[y] * back));
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("exact mixing time basics") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.0);
  const LumpedKernel kernel = build_lumped_kernel(m, 10);
  const MixingResult mix = exact_mixing_time(kernel);

  // d(0) from the worst default start equals 1 - pi(start)
  double expected_d0 = 0.0;
  for (std::size_t s : default_start_states(*kernel.states))
    expected_d0 = std::max(expected_d0, 1.0 - kernel.pi[s]);
  CHECK(mix.d_curve[0] == doctest::Approx(expected_d0).epsilon(1e-12));

  // d(t) nonincreasing, threshold crossed exactly at t_mix
  for (std::size_t t = 1; t < mix.d_curve.size(); ++t)
    CHECK(mix.d_curve[t] <= mix.d_curve[t - 1] + 1e-12);
  CHECK(mix.d_curve.back() <= 0.25);
  if (mix.t_mix > 0) CHECK(mix.d_curve[mix.d_curve.size() - 2] > 0.25);

  // the full-start maximum dominates the default-start maximum
  MixingOptions all;
  all.all_starts = true;
  const MixingResult mix_all = exact_mixing_time(kernel, all);
  CHECK(mix_all.t_mix >= mix.t_mix);
}

TEST_CASE("exact mixing guard throws on non-convergence") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 4.5);
  const LumpedKernel kernel = build_lumped_kernel(m, 14);
  MixingOptions options;
  options.max_steps = 10;
  CHECK_THROWS(exact_mixing_time(kernel, options));
}

TEST_CASE("lumped_tv_between starts at 1 for distinct pure starts") {
  const ModelSpec m = ModelSpec::gcwp(3, 2.0, 1.5);
  const LumpedKernel kernel = build_lumped_kernel(m, 8);
  const auto starts = default_start_states(*kernel.states);
  const auto curve = lumped_tv_between(kernel, starts[0], starts[1], 30);
  CHECK(curve[0] == doctest::Approx(1.0));
  for (std::size_t t = 1; t < curve.size(); ++t)
    CHECK(curve[t] <= curve[t - 1] + 1e-12);
}

TEST_CASE("simulated occupation matches gibbs_weights within 3 batch-means SE") {
  const ModelSpec m = ModelSpec::gcwp(2, 2.0, 1.0);
  const std::int64_t n = 10;
  const GibbsWeights exact = gibbs_weights(m, n);
  RngStream rng(1234, 0);
  Configuration c = Configuration::constant(n, 2, 0);
  std::vector<std::int64_t> counts = empirical_measure(c).counts();
  const std::int64_t burn_in = 100'000;
  const std::int64_t steps = 10'000'000;
  const std::int64_t batch = 10'000;
  const std::size_t nbatches = static_cast<std::size_t>(steps / batch);
  std::vector<std::vector<double>> batch_freq(
      exact.prob.size(), std::vector<double>(nbatches, 0.0));
  for (std::int64_t t = 0; t < burn_in; ++t) glauber_step(m, c, counts, rng);
  for (std::size_t b = 0; b < nbatches; ++b) {
    for (std::int64_t t = 0; t < batch; ++t) {
      glauber_step(m, c, counts, rng);
      batch_freq[exact.states->index(counts)][b] += 1.0;
    }
  }
  for (auto& row : batch_freq)
    for (auto& v : row) v /= static_cast<double>(batch);
  for (std::size_t i = 0; i < exact.prob.size(); ++i) {
    double mean = 0.0;
    for (double v : batch_freq[i]) mean += v;
    mean /= static_cast<double>(nbatches);
    double var = 0.0;
    for (double v : batch_freq[i]) var += (v - mean) * (v - mean);
    var /= static_cast<double>(nbatches - 1);
    const double se = std::sqrt(var / static_cast<double>(nbatches));
    CHECK(std::abs(mean - exact.prob[i]) <= 3.0 * se + 1e-12);
  }
}
