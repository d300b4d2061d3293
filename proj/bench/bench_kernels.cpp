// Serial reference vs OpenMP assembly, and analytic vs finite-difference U.

#include <benchmark/benchmark.h>

#include "holo/analysis.hpp"
#include "holo/kernels.hpp"
#include "holo/solvers.hpp"

using namespace holo;

namespace {

const MediumConfig kMedium;

kernels::Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? kernels::Exec::Serial : kernels::Exec::Parallel;
}

std::vector<Vec3> grid_points(int n) {
  std::vector<Vec3> pts;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) pts.emplace_back(-0.05 + 0.1 * i / n, 0.0, 0.02 + 0.1 * j / n);
  return pts;
}

void BM_PistonAssembly(benchmark::State& state) {
  const auto board = preset_board(BoardKind::Bottom);
  const auto pts = grid_points(64);
  const auto order = static_cast<kernels::Order>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::assemble_piston(pts, board, kMedium.wavenumber(), order, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size() * board.size()));
}
BENCHMARK(BM_PistonAssembly)
    ->ArgNames({"parallel", "order"})
    ->ArgsProduct({{0, 1}, {0, 1, 2}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_SurfaceOperator(benchmark::State& state) {
  const SurfaceMesh plate = make_plate(0.16, 0.16, 30, 30);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::assemble_surface_operator(plate, kMedium.wavenumber(), exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(plate.size() * plate.size()));
}
BENCHMARK(BM_SurfaceOperator)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GreenAssembly(benchmark::State& state) {
  const SurfaceMesh plate = make_plate(0.16, 0.16, 20, 20);
  const auto pts = grid_points(32);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::assemble_green(pts, plate, kMedium.wavenumber(), kernels::Order::Gradient, exec_of(state)));
}
BENCHMARK(BM_GreenAssembly)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

// One point per call, as in interactive trap evaluation.
void BM_Gorkov(benchmark::State& state) {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const ComplexVector x = naive(prop.transfer(PointSet({Vec3::Zero()})), TargetAmplitudes::uniform(1)).activations();
  const GorkovConstants constants = gorkov_constants(kMedium, ParticleConfig());
  AnalysisOptions options;
  options.mode = state.range(0) == 0 ? DerivativeMode::Analytic : DerivativeMode::FiniteDifference;
  const PointSet point({Vec3(0.003, -0.002, 0.001)});
  for (auto _ : state) benchmark::DoNotOptimize(gorkov(x, prop, point, constants, options));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Gorkov)->ArgName("fd")->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
