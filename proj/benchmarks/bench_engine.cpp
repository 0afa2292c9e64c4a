#include <benchmark/benchmark.h>

#include "eitmc/boundary_data.hpp"
#include "eitmc/pde_oracle.hpp"
#include "eitmc/reflecting_sde.hpp"

namespace {

using namespace eitmc;

void BM_PhiloxBlock(benchmark::State& state) {
    std::array<std::uint32_t, 4> ctr{1, 2, 3, 4};
    for (auto _ : state) {
        ctr = Philox4x32::block({7, 11}, ctr);
        benchmark::DoNotOptimize(ctr);
    }
}
BENCHMARK(BM_PhiloxBlock);

void BM_GaussianPair(benchmark::State& state) {
    RandomStream rng(1, 0);
    for (auto _ : state) {
        auto g = rng.gaussian_pair();
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_GaussianPair);

void BM_ReflectedStep_Constant(benchmark::State& state) {
    const auto disk = DomainGeometry::disk({0, 0}, 1.0);
    const auto field = ConductivityField::constant(Mat2Sym::identity(), 1.0);
    SimulationParams params;
    params.dt = 1e-4;
    RandomStream rng(1, 0);
    PathState s;
    s.position = {0.5, 0.0};
    for (auto _ : state) {
        const auto r = step(s, field, disk, params.dt, rng.gaussian_pair());
        s = r.state;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReflectedStep_Constant);

void BM_ReflectedStep_Bump(benchmark::State& state) {
    const auto disk = DomainGeometry::disk({0, 0}, 1.0);
    const auto field = ConductivityField::smooth_bump(Mat2Sym::identity(),
                                                      {0.2, 0.0}, 0.5, 2.0, 4.0)
                           .with_collar(0.2, disk);
    SimulationParams params;
    params.dt = 1e-4;
    RandomStream rng(1, 0);
    PathState s;
    s.position = {0.5, 0.0};
    for (auto _ : state) {
        const auto r = step(s, field, disk, params.dt, rng.gaussian_pair());
        s = r.state;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReflectedStep_Bump);

void BM_ReflectedStep_Polygon(benchmark::State& state) {
    const auto hex = DomainGeometry::convex_polygon(
        {{1, 0}, {0.5, 0.87}, {-0.5, 0.87}, {-1, 0}, {-0.5, -0.87}, {0.5, -0.87}});
    const auto field = ConductivityField::constant(Mat2Sym::identity(), 1.0);
    RandomStream rng(1, 0);
    PathState s;
    s.position = {0.2, 0.0};
    for (auto _ : state) {
        const auto r = step(s, field, hex, 1e-4, rng.gaussian_pair());
        s = r.state;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReflectedStep_Polygon);

void BM_FdSolveContinuum(benchmark::State& state) {
    const auto disk = DomainGeometry::disk({0, 0}, 1.0);
    FourierSeries f;
    f.period = disk.boundary_measure();
    f.cos_coeffs = {1.0};
    const auto data = BoundaryFunction::fourier(f);
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto sol = fd_solve(
            ProblemKind::continuum, disk, [](Vec2) { return 1.0; }, &data,
            nullptr, res);
        benchmark::DoNotOptimize(sol.values().data());
    }
}
BENCHMARK(BM_FdSolveContinuum)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
