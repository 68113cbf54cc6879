#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "sphkura/continuum.hpp"
#include "sphkura/dynamics.hpp"
#include "sphkura/graph.hpp"
#include "sphkura/harmonics.hpp"

using namespace sphkura;

static void BM_BuildRgg(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cloud = sample_uniform(n, 1);
    const double eps = 4.0 / std::cbrt(static_cast<double>(n));
    for (auto _ : state) {
        auto g = build_rgg(cloud, eps, Kernel::indicator(), 1);
        benchmark::DoNotOptimize(g.directed_edge_count());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BuildRgg)->Arg(2000)->Arg(8000)->Arg(32000)->Unit(benchmark::kMillisecond);

static void BM_BruteForceNeighbors(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cloud = sample_uniform(n, 1);
    const double eps = 4.0 / std::cbrt(static_cast<double>(n));
    for (auto _ : state) {
        std::size_t edges = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                edges += (i != j && euclid_dist2(cloud.points[i], cloud.points[j]) < eps) ? 1 : 0;
            }
        }
        benchmark::DoNotOptimize(edges);
    }
}
BENCHMARK(BM_BruteForceNeighbors)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

static void BM_KuramotoRhs(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cloud = sample_uniform(n, 2);
    const auto g = build_rgg(cloud, 4.0 / std::cbrt(static_cast<double>(n)), Kernel::indicator(), 1);
    std::vector<double> u(n), du(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = 0.3 * cloud.points[i].z();
    }
    for (auto _ : state) {
        rhs(g, u, du, static_cast<unsigned>(state.range(1)));
        benchmark::DoNotOptimize(du.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.directed_edge_count()));
}
BENCHMARK(BM_KuramotoRhs)->Args({8000, 1})->Args({32000, 1})->Args({32000, 4})->Unit(benchmark::kMillisecond);

static void BM_HarmonicRoundTrip(benchmark::State& state)
{
    const auto L = static_cast<int>(state.range(0));
    const auto grid = std::make_shared<const QuadratureGrid>(L + 1, 2 * L + 2);
    const SphericalTransform transform(grid, L);
    const auto values = grid->sample([](const UnitVec3& p) { return p.x() * p.y() + p.z(); });
    for (auto _ : state) {
        auto h = transform.project(values);
        auto back = transform.evaluate(h);
        benchmark::DoNotOptimize(back.data());
    }
}
BENCHMARK(BM_HarmonicRoundTrip)->Arg(16)->Arg(32)->Arg(63)->Unit(benchmark::kMicrosecond);

static void BM_NonlocalOperatorSine(benchmark::State& state)
{
    const auto grid = std::make_shared<const QuadratureGrid>(64, 128);
    const NonlocalOperator op(grid, 0.02, Kernel::indicator(), static_cast<int>(state.range(0)));
    const auto u = grid->sample([](const UnitVec3& p) { return 0.3 * p.z(); });
    std::vector<double> out(u.size());
    for (auto _ : state) {
        op.apply(u, Coupling::Sine, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_NonlocalOperatorSine)->Arg(16)->Arg(63)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
