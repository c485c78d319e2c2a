// Serial vs OpenMP drivers on the same ensembles.

#include "fdh/conditions.hpp"
#include "fdh/montecarlo.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace fdh;

struct Setup {
  SpectralModel model = SpectralModel::build(MeasureSpace::uniform(8), SpectralModel::dirichlet_laplacian_1d(8),
                                             SpectralModel::power_noise(8, 0.25));
  CoefficientSet coeffs =
      CoefficientSet::constant(0.5, 1.0, 0.0, 8.0 / 3.0, norm_domination_lower_bound(model, 8.0 / 3.0));
  StateVector x = StateVector::Constant(8, 0.3);
  StateVector y = x + 0.1 * model.eigenfunction(0) / model.norm_h(model.eigenfunction(0));
};

EnsembleConfig make_run(const benchmark::State& state) {
  EnsembleConfig cfg;
  cfg.n_paths = state.range(1);
  cfg.T = 0.25;
  cfg.dt = 1e-3;
  cfg.seed = 1;
  cfg.execution = state.range(0) == 0 ? Execution::Serial : Execution::OpenMP;
  return cfg;
}

void BM_EstimatePtf(benchmark::State& state) {
  const Setup s;
  const EnsembleConfig cfg = make_run(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_ptf(s.model, s.coeffs, cfg, s.x, TestFunction::exp_neg_h_sq()));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

void BM_RunCoupled(benchmark::State& state) {
  const Setup s;
  const EnsembleConfig cfg = make_run(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_coupled(s.model, s.coeffs, cfg, s.x, s.y));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

BENCHMARK(BM_EstimatePtf)->ArgsProduct({{0, 1}, {256, 1024}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunCoupled)->ArgsProduct({{0, 1}, {256, 1024}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
