#include <benchmark/benchmark.h>

#include "fpmass/asymptotics.hpp"
#include "fpmass/fpsolver.hpp"
#include "fpmass/observables.hpp"
#include "fpmass/sdemc.hpp"

using namespace fpmass;

namespace {

McParams mc_params(std::uint64_t particles) {
  const auto pot = make_cosine();
  McParams p;
  p.sigma = 0.5;
  p.nu = 0.5;
  p.tau = compute_scalars(pot, 0.5, 0.5).tau;
  p.n_particles = particles;
  p.dt = max_stable_dt(pot, p.nu, p.tau);
  p.T = 2000 * p.dt;
  p.seed = 3;
  return p;
}

void set_counters(benchmark::State& st, const McParams& p) {
  st.counters["steps/s"] = benchmark::Counter(static_cast<double>(p.n_particles) * (p.T / p.dt),
                                               benchmark::Counter::kIsIterationInvariantRate);
}

void BM_simulate_reference(benchmark::State& st) {
  const auto pot = make_cosine();
  const auto p = mc_params(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_reference(pot, p).positions.data());
  set_counters(st, p);
}

void BM_simulate_serial(benchmark::State& st) {
  const auto pot = make_cosine();
  const auto p = mc_params(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate(pot, p, Execution::Serial).positions.data());
  set_counters(st, p);
}

void BM_simulate_parallel(benchmark::State& st) {
  const auto pot = make_cosine();
  const auto p = mc_params(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate(pot, p, Execution::Parallel).positions.data());
  set_counters(st, p);
}

void BM_implicit_step(benchmark::State& st) {
  const auto pot = make_cosine();
  const auto cp = find_critical_points(pot, 0.5);
  const Grid1D grid = make_well_grid(cp, -2, 6, static_cast<int>(st.range(0)));
  const auto he = sample_effective_potential(pot, 0.5, grid);
  const auto A = build_generator(he, 0.5, grid.h);
  DensityField rho{grid, std::vector<double>(grid.n, 1.0 / (grid.n * grid.h))};
  for (auto _ : st) {
    rho = step(rho, 1e-3, A, 1.0);
    benchmark::DoNotOptimize(rho.values.data());
  }
  st.SetItemsProcessed(st.iterations() * grid.n);
}

}  // namespace

BENCHMARK(BM_simulate_reference)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_serial)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_parallel)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_implicit_step)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
