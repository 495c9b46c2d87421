#include "gibbslab/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gibbslab/numeric.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {

void update_distribution_counts(const ModelSpec& model,
                                std::span<const std::int64_t> counts,
                                std::int64_t n, int current_spin,
                                std::span<double> out) {
  const int q = model.q();
  if (static_cast<int>(counts.size()) != q || static_cast<int>(out.size()) != q)
    throw std::invalid_argument("update_distribution: arity mismatch");
  if (current_spin < 0 || current_spin >= q ||
      counts[static_cast<std::size_t>(current_spin)] < 1)
    throw std::invalid_argument("update_distribution: current spin not present");
  const double nd = static_cast<double>(n);
  const double beta_n = model.beta() * nd;
  const std::size_t m = static_cast<std::size_t>(current_spin);
  const double cm = static_cast<double>(counts[m]);
  // Energy change from vacating the current spin; shared by all candidates.
  const double vacate = model.h(current_spin, (cm - 1.0) / nd) -
                        model.h(current_spin, cm / nd);
  for (int k = 0; k < q; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (k == current_spin) {
      out[i] = 0.0;  // candidate counts equal the current counts
      continue;
    }
    const double ck = static_cast<double>(counts[i]);
    const double occupy =
        model.h(k, (ck + 1.0) / nd) - model.h(k, ck / nd);
    out[i] = -beta_n * (vacate + occupy);
  }
  softmax_inplace(out);
}

std::vector<double> update_distribution(const ModelSpec& model,
                                        const Configuration& config,
                                        std::int64_t vertex) {
  if (vertex < 0 || vertex >= config.n())
    throw std::invalid_argument("update_distribution: vertex out of range");
  if (config.q() != model.q())
    throw std::invalid_argument("update_distribution: arity mismatch");
  const LatticePoint counts = empirical_measure(config);
  std::vector<double> out(static_cast<std::size_t>(model.q()));
  update_distribution_counts(model, counts.counts(), config.n(),
                             config.spin(vertex), out);
  return out;
}

std::vector<double> update_distribution_expansion(const ModelSpec& model,
                                                  const SimplexPoint& z,
                                                  int current_spin,
                                                  std::int64_t n) {
  const int q = model.q();
  if (z.q() != q) throw std::invalid_argument("expansion: arity mismatch");
  if (current_spin < 0 || current_spin >= q)
    throw std::invalid_argument("expansion: bad spin label");
  std::vector<double> g(static_cast<std::size_t>(q));
  g_function_into(model, z.span(), g);
  // Q H(z) = (h_1''(z_1), ..., h_q''(z_q)).
  std::vector<double> qh(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k)
    qh[static_cast<std::size_t>(k)] = model.d2h(k, z[k]);
  const std::size_t m = static_cast<std::size_t>(current_spin);
  std::vector<double> out(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    // Gradient of the softmax component: d(partial_k Gamma)/d a_j evaluated
    // at a = -beta grad H(z) is g_k (delta_kj - g_j).
    double dot = 0.0;  // <QH, grad partial_k Gamma>
    for (int j = 0; j < q; ++j) {
      const std::size_t jj = static_cast<std::size_t>(j);
      const double jac = g[i] * ((j == k ? 1.0 : 0.0) - g[jj]);
      dot += qh[jj] * jac;
    }
    const double jac_m = g[i] * ((static_cast<int>(m) == k ? 1.0 : 0.0) - g[m]);
    const double phi = -0.5 * dot + qh[m] * jac_m;
    out[i] = g[i] + model.beta() / static_cast<double>(n) * phi;
  }
  return out;
}

void glauber_step(const ModelSpec& model, Configuration& config,
                  std::vector<std::int64_t>& counts, RngStream& rng) {
  const std::int64_t n = config.n();
  const std::int64_t vertex = rng.next_index(static_cast<int>(n));
  const int old_spin = config.spin(vertex);
  std::vector<double> probs(static_cast<std::size_t>(model.q()));
  update_distribution_counts(model, counts, n, old_spin, probs);
  const int new_spin = rng.sample(probs);
  if (new_spin != old_spin) {
    --counts[static_cast<std::size_t>(old_spin)];
    ++counts[static_cast<std::size_t>(new_spin)];
    config.set_spin(vertex, new_spin);
  }
}

LumpedKernel build_lumped_kernel(const ModelSpec& model, std::int64_t n,
                                 int threads) {
  const int q = model.q();
  const GibbsWeights weights = gibbs_weights(model, n);
  const StateSpace& states = *weights.states;
  const std::size_t size = states.size();

  LumpedKernel kernel;
  kernel.states = weights.states;
  kernel.pi = weights.prob;
  kernel.q = q;
  kernel.n = n;
  kernel.row_ptr.assign(size + 1, 0);

  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(size);
  parallel_for(size, threads, [&](std::size_t i) {
    const auto counts = states.state(i);
    auto& row = rows[i];
    std::vector<double> update(static_cast<std::size_t>(q));
    std::vector<std::int64_t> target;
    double stay = 0.0;
    for (int m = 0; m < q; ++m) {
      const std::int64_t cm = counts[static_cast<std::size_t>(m)];
      if (cm == 0) continue;
      const double pick = static_cast<double>(cm) / static_cast<double>(n);
      update_distribution_counts(model, counts, n, m, update);
      stay += pick * update[static_cast<std::size_t>(m)];
      for (int k = 0; k < q; ++k) {
        if (k == m) continue;
        target = counts;
        --target[static_cast<std::size_t>(m)];
        ++target[static_cast<std::size_t>(k)];
        row.emplace_back(static_cast<std::uint32_t>(states.index(target)),
                         pick * update[static_cast<std::size_t>(k)]);
      }
    }
    row.emplace_back(static_cast<std::uint32_t>(i), stay);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  });
  for (std::size_t i = 0; i < size; ++i) {
    kernel.row_ptr[i + 1] = kernel.row_ptr[i] + rows[i].size();
    for (const auto& [c, p] : rows[i]) {
      kernel.col.push_back(c);
      kernel.prob.push_back(p);
    }
  }
  return kernel;
}

void lumped_step(const LumpedKernel& kernel, std::span<const double> in,
                 std::span<double> out) {
  const std::size_t size = kernel.size();
  if (in.size() != size || out.size() != size)
    throw std::invalid_argument("lumped_step: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t x = 0; x < size; ++x) {
    const double mass = in[x];
    if (mass == 0.0) continue;
    for (std::size_t e = kernel.row_ptr[x]; e < kernel.row_ptr[x + 1]; ++e)
      out[kernel.col[e]] += mass * kernel.prob[e];
  }
}

std::vector<std::size_t> default_start_states(const StateSpace& states) {
  const int q = states.q();
  const std::int64_t n = states.n();
  std::vector<std::size_t> starts;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(q), 0);
  for (int k = 0; k < q; ++k) {
    std::fill(counts.begin(), counts.end(), 0);
    counts[static_cast<std::size_t>(k)] = n;
    starts.push_back(states.index(counts));
  }
  const std::int64_t base = n / q;
  const int rem = static_cast<int>(n % q);
  for (int k = 0; k < q; ++k)
    counts[static_cast<std::size_t>(k)] = base + (k < rem ? 1 : 0);
  const std::size_t balanced = states.index(counts);
  if (std::find(starts.begin(), starts.end(), balanced) == starts.end())
    starts.push_back(balanced);
  return starts;
}

MixingResult exact_mixing_time(const LumpedKernel& kernel,
                               const MixingOptions& options) {
  const std::size_t size = kernel.size();
  std::vector<std::size_t> starts;
  if (options.all_starts) {
    starts.resize(size);
    for (std::size_t i = 0; i < size; ++i) starts[i] = i;
  } else {
    starts = default_start_states(*kernel.states);
  }

  std::vector<std::vector<double>> dist(starts.size(),
                                        std::vector<double>(size, 0.0));
  for (std::size_t s = 0; s < starts.size(); ++s) dist[s][starts[s]] = 1.0;
  std::vector<double> scratch(size);

  MixingResult result;
  for (std::int64_t t = 0;; ++t) {
    double d = 0.0;
    for (const auto& mu : dist)
      d = std::max(d, tv_distance(mu, kernel.pi));
    result.d_curve.push_back(d);
    if (d <= options.epsilon) {
      result.t_mix = t;
      return result;
    }
    if (t >= options.max_steps)
      throw std::runtime_error(
          "exact_mixing_time: no convergence within " +
          std::to_string(options.max_steps) + " steps (d = " + format_g17(d) +
          ", epsilon = " + format_g17(options.epsilon) + ")");
    for (auto& mu : dist) {
      lumped_step(kernel, mu, scratch);
      std::swap(mu, scratch);
    }
  }
}

std::vector<double> lumped_tv_between(const LumpedKernel& kernel,
                                      std::size_t x0, std::size_t y0,
                                      std::int64_t t_max) {
  const std::size_t size = kernel.size();
  if (x0 >= size || y0 >= size)
    throw std::invalid_argument("lumped_tv_between: start out of range");
  std::vector<double> mu(size, 0.0), nu(size, 0.0), scratch(size);
  mu[x0] = 1.0;
  nu[y0] = 1.0;
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(t_max) + 1);
  for (std::int64_t t = 0;; ++t) {
    curve.push_back(tv_distance(mu, nu));
    if (t == t_max) break;
    lumped_step(kernel, mu, scratch);
    std::swap(mu, scratch);
    lumped_step(kernel, nu, scratch);
    std::swap(nu, scratch);
  }
  return curve;
}

}  // namespace gibbslab
