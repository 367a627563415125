#include <benchmark/benchmark.h>

#include "usct/adjoint.hpp"
#include "usct/cbs.hpp"
#include "usct/geometry.hpp"
#include "usct/phantom.hpp"

namespace {

constexpr double kOmega = 2.0 * 3.14159265358979323846 * 5.0e5;

usct::Grid2D desk_grid(int n) { return usct::make_centered_grid(n, n, 5.0e-4); }

void GreensApply(benchmark::State& state) {
    const auto grid = desk_grid(static_cast<int>(state.range(0)));
    const auto speed = usct::random_phantom(1, grid, usct::PhantomClass::Strong);
    usct::CbsWorkspace ws(speed, kOmega, usct::CbsConfig{});
    usct::ComplexField f(ws.padded_grid(), {1.0, 0.5});
    for (auto _ : state) {
        auto out = ws.greens_apply(f);
        benchmark::DoNotOptimize(out.values.data());
    }
}
BENCHMARK(GreensApply)->Arg(64)->Arg(96)->Arg(128);

void CbsSolveStrong(benchmark::State& state) {
    const auto grid = desk_grid(static_cast<int>(state.range(0)));
    const auto speed = usct::random_phantom(1, grid, usct::PhantomClass::Strong);
    const auto array = usct::build_array(usct::full_ring(8), 0.92 * grid.extent_x());
    const auto src = usct::make_source(array, 0, grid);
    for (auto _ : state) {
        auto sol = usct::cbs_solve(speed, src, kOmega, usct::CbsConfig{});
        benchmark::DoNotOptimize(sol.report.iterations_used);
    }
}
BENCHMARK(CbsSolveStrong)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BatchedForward(benchmark::State& state) {
    const auto grid = desk_grid(64);
    const auto speed = usct::random_phantom(1, grid, usct::PhantomClass::Weak);
    const auto array =
        usct::build_array(usct::full_ring(static_cast<int>(state.range(0))), 0.92 * grid.extent_x());
    for (auto _ : state) {
        auto sim = usct::forward_simulate(speed, array, kOmega, usct::CbsConfig{});
        benchmark::DoNotOptimize(sim.matrix.values.data());
    }
}
BENCHMARK(BatchedForward)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void ObjectiveAndGradient(benchmark::State& state) {
    const auto grid = desk_grid(64);
    const auto truth = usct::random_phantom(2, grid, usct::PhantomClass::Weak);
    const auto array = usct::build_array(usct::full_ring(8), 0.92 * grid.extent_x());
    const auto observed = usct::forward_simulate(truth, array, kOmega, usct::CbsConfig{}).matrix;
    usct::SoundSpeedField background(grid, 1500.0);
    for (auto _ : state) {
        auto r = usct::objective_and_gradient(background, observed, array, usct::CbsConfig{});
        benchmark::DoNotOptimize(r.objective.value);
    }
}
BENCHMARK(ObjectiveAndGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
