#include <benchmark/benchmark.h>

#include <cmath>

#include "pathwise/oracle.hpp"
#include "pathwise/pathwise_value.hpp"

namespace {

using namespace pathwise;

ProblemSpec quadratic_1d(int N) {
    ProblemSpec spec;
    spec.horizon = TimeGrid(0.0, 1.0, N);
    spec.terminal = CatalogEntry::quadratic(1.0);
    spec.control_bound = default_control_bound(spec.potential, spec.terminal, spec.nu, spec.horizon, 4.0);
    return spec;
}

void BM_GeneratePath(benchmark::State& state) {
    const TimeGrid grid(0.0, 1.0, int(state.range(0)));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(generate_path(seed++, grid, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratePath)->Arg(400)->Arg(6400);

void BM_RefinePath(benchmark::State& state) {
    const auto path = generate_path(3, TimeGrid(0.0, 1.0, 400), 2);
    for (auto _ : state) benchmark::DoNotOptimize(refine_path(path, int(state.range(0))));
}
BENCHMARK(BM_RefinePath)->Arg(1)->Arg(3);

void BM_HJStep1D(benchmark::State& state) {
    const auto spec = quadratic_1d(400);
    const SpaceGrid grid(-4.0, 4.0, int(state.range(0)));
    const HJStepper stepper(spec, grid, spec.horizon.delta());
    const auto next = ScalarField::sample(grid, [](const Vec& x) { return 0.5 * x[0] * x[0]; });
    const std::vector<double> running(grid.node_count(), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(next, running));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HJStep1D)->Arg(401)->Arg(801);

void BM_HJStep2D(benchmark::State& state) {
    ProblemSpec spec;
    spec.dim = 2;
    spec.lattice_K = 5;
    spec.horizon = TimeGrid(0.0, 1.0, 100);
    spec.terminal = CatalogEntry::quadratic(1.0);
    spec.control_bound = default_control_bound(spec.potential, spec.terminal, spec.nu, spec.horizon, 4.0 * std::sqrt(2.0));
    const SpaceGrid grid(Vec{-4.0, -4.0}, Vec{4.0, 4.0}, int(state.range(0)), 2);
    const HJStepper stepper(spec, grid, spec.horizon.delta());
    const auto next = ScalarField::sample(grid, [](const Vec& x) { return 0.5 * norm2(x); });
    const std::vector<double> running(grid.node_count(), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(next, running));
    state.SetItemsProcessed(state.iterations() * std::int64_t(grid.node_count()));
}
BENCHMARK(BM_HJStep2D)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_SolveShift1D(benchmark::State& state) {
    const auto spec = quadratic_1d(int(state.range(0)));
    const SpaceGrid grid(-4.0, 4.0, int(state.range(0)) + 1);
    const auto path = generate_path(1, spec.horizon, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_by_shift(spec, path, grid));
}
BENCHMARK(BM_SolveShift1D)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_OracleEnumeration(benchmark::State& state) {
    auto spec = quadratic_1d(int(state.range(0)));
    spec.control_bound = 4.0;
    const auto path = generate_path(3, spec.horizon, 1);
    OracleOptions opt;
    opt.K_ctrl = 10;
    opt.mode = OracleMode::enumeration;
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_value(spec, path, 0, Vec{0.7}, opt));
}
BENCHMARK(BM_OracleEnumeration)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OracleLatticeDP(benchmark::State& state) {
    auto spec = quadratic_1d(int(state.range(0)));
    spec.control_bound = 4.0;
    const auto path = generate_path(3, spec.horizon, 1);
    OracleOptions opt;
    opt.K_ctrl = 40;
    opt.mode = OracleMode::lattice_dp;
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_value(spec, path, 0, Vec{0.7}, opt));
}
BENCHMARK(BM_OracleLatticeDP)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
