#include <benchmark/benchmark.h>

#include <vector>

#include "stokpp/grid_field.hpp"
#include "stokpp/kpp_solver.hpp"
#include "stokpp/noise.hpp"
#include "stokpp/tridiagonal.hpp"

using namespace stokpp;

namespace {

GridSpec grid_of(benchmark::State& state) { return default_grid(static_cast<double>(state.range(0)), 0.05); }

}  // namespace

static void BM_DiffusionHalfStep(benchmark::State& state) {
  const GridSpec grid = grid_of(state);
  ImplicitDiffusion diffusion(grid.n, grid.dx, 1.0, 0.0, 0.005);
  Field u = make_initial_condition(1.0, grid);
  for (auto _ : state) {
    diffusion.apply(u.values, 0.95);
    benchmark::DoNotOptimize(u.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_DiffusionHalfStep)->Arg(50)->Arg(200)->Arg(800);

static void BM_FieldNoiseEmbedding(benchmark::State& state) {
  const GridSpec grid = grid_of(state);
  NoiseModel model;
  model.kernel = CovarianceKernel::squared_exponential(1.0, 2.0);
  model.seed = 1;
  FieldNoise noise(model, grid, 0.01, FieldNoise::Method::embedding);
  std::vector<double> out(grid.n);
  for (auto _ : state) {
    noise.next(out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_FieldNoiseEmbedding)->Arg(50)->Arg(200)->Arg(800);

static void BM_FieldNoiseDense(benchmark::State& state) {
  const GridSpec grid = grid_of(state);
  NoiseModel model;
  model.kernel = CovarianceKernel::squared_exponential(1.0, 2.0);
  model.seed = 1;
  FieldNoise noise(model, grid, 0.01, FieldNoise::Method::dense);
  std::vector<double> out(grid.n);
  for (auto _ : state) {
    noise.next(out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_FieldNoiseDense)->Arg(10)->Arg(25);

static void BM_SpdeStep(benchmark::State& state) {
  const GridSpec grid = grid_of(state);
  KppParams params;
  params.epsilon = 1.0;
  params.N = 1.0;
  params.noise.kernel = state.range(1) ? CovarianceKernel::squared_exponential(1.0, 2.0) : CovarianceKernel::constant();
  params.noise.seed = 1;
  KppSolver solver(params, make_initial_condition(params.N, grid));
  for (auto _ : state) solver.step_spde();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_SpdeStep)->Args({200, 0})->Args({200, 1});

static void BM_NormalizedStep(benchmark::State& state) {
  const GridSpec grid = grid_of(state);
  KppParams params;
  params.N = 3.0;
  KppSolver solver(params, make_initial_condition(params.N, grid));
  for (auto _ : state) solver.step_normalized(1.0);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_NormalizedStep)->Arg(200);

BENCHMARK_MAIN();
