#include <benchmark/benchmark.h>

#include <vector>

#include "gibbslab/coupling.hpp"
#include "gibbslab/equilibrium.hpp"
#include "gibbslab/glauber.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/path_coupling.hpp"
#include "gibbslab/rng.hpp"

using namespace gibbslab;

namespace {

void BM_g_function(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  const std::vector<double> z{0.5, 0.3, 0.2};
  std::vector<double> out(3);
  for (auto _ : state) {
    g_function_into(model, z, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_g_function);

void BM_update_distribution(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  const std::vector<std::int64_t> counts{500, 300, 200};
  std::vector<double> out(3);
  for (auto _ : state) {
    update_distribution_counts(model, counts, 1000, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_update_distribution);

void BM_glauber_step(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  RngStream rng(1, 0);
  Configuration config = Configuration::random_product(1000, 3, rng);
  std::vector<std::int64_t> counts = empirical_measure(config).counts();
  for (auto _ : state) {
    glauber_step(model, config, counts, rng);
    benchmark::DoNotOptimize(counts.data());
  }
}
BENCHMARK(BM_glauber_step);

void BM_coupling_step(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  CouplingTrial trial = CouplingTrial::make(
      Configuration::constant(1000, 3, 0), Configuration::constant(1000, 3, 1),
      RngStream(2, 0));
  for (auto _ : state) {
    greedy_coupling_step(model, trial);
    if (trial.distance == 0) {
      state.PauseTiming();
      trial = CouplingTrial::make(Configuration::constant(1000, 3, 0),
                                  Configuration::constant(1000, 3, 1),
                                  RngStream(2, trial.rng.stream_id() + 1));
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_coupling_step);

void BM_build_lumped_kernel(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    const LumpedKernel kernel = build_lumped_kernel(model, n);
    benchmark::DoNotOptimize(kernel.prob.data());
  }
}
BENCHMARK(BM_build_lumped_kernel)->Arg(20)->Arg(40);

void BM_lumped_step(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  const LumpedKernel kernel = build_lumped_kernel(model, 40);
  std::vector<double> mu = kernel.pi;
  std::vector<double> out(kernel.size());
  for (auto _ : state) {
    lumped_step(kernel, mu, out);
    std::swap(mu, out);
    benchmark::DoNotOptimize(mu.data());
  }
}
BENCHMARK(BM_lumped_step);

void BM_aggregate_variation_closed_form(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 1.4);
  const SimplexPoint z({0.55, 0.25, 0.2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate_variation_closed_form(model, z));
  }
}
BENCHMARK(BM_aggregate_variation_closed_form);

void BM_solve_mean_field(benchmark::State& state) {
  const ModelSpec model = ModelSpec::gcwp(3, 2.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mean_field(model));
  }
}
BENCHMARK(BM_solve_mean_field);

}  // namespace

BENCHMARK_MAIN();
