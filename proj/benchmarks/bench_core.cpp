#include <benchmark/benchmark.h>

#include "siht/coherence.hpp"
#include "siht/isp_model.hpp"
#include "siht/solvers.hpp"

using namespace siht;

namespace {

struct Scene {
    DetectorArray det;
    AngleGrid grid;
    ComplexMatrix a;
    ComplexVector x, b;

    Scene(std::size_t m, std::size_t n, std::size_t k)
        : det(fibonacci_sphere_detectors(m, 275.0)), grid(grid_1d(n)), a(sensing_matrix(det, grid))
    {
        CounterRng rng(1);
        x.assign(n, cplx{});
        for (std::size_t i = 0; i < k; ++i) x[rng.below(n)] = cplx{1.0};
        b = siht::apply(a, x);
    }
};

void BM_SensingMatrix(benchmark::State& state)
{
    const auto det = fibonacci_sphere_detectors(static_cast<std::size_t>(state.range(0)), 275.0);
    const auto grid = grid_1d(1000);
    for (auto _ : state) benchmark::DoNotOptimize(sensing_matrix(det, grid));
}
BENCHMARK(BM_SensingMatrix)->Arg(100)->Arg(400);

void BM_IhtDirect(benchmark::State& state)
{
    const Scene s(400, 1000, static_cast<std::size_t>(state.range(0)));
    SolveConfig cfg;
    cfg.max_iters = 50;
    cfg.residual_tol = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(iht_solve(s.a, s.b, state.range(0), cfg));
}
BENCHMARK(BM_IhtDirect)->Arg(20)->Arg(60);

void BM_IhtGram(benchmark::State& state)
{
    const Scene s(400, 1000, static_cast<std::size_t>(state.range(0)));
    const GramMatrix g(s.a);
    SolveConfig cfg;
    cfg.max_iters = 50;
    cfg.residual_tol = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(iht_solve(g, s.b, state.range(0), cfg));
}
BENCHMARK(BM_IhtGram)->Arg(20)->Arg(60);

void BM_StructuredGram(benchmark::State& state)
{
    const Scene s(400, 1000, 40);
    const GramMatrix g(s.a);
    const auto ss = SparsityStructure::uniform_split(1000, 20).with_budgets_from(s.x);
    SolveConfig cfg;
    cfg.max_iters = 50;
    cfg.residual_tol = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(structured_iht_solve(g, s.b, ss, cfg));
}
BENCHMARK(BM_StructuredGram);

void BM_CoherenceTable(benchmark::State& state)
{
    const Scene s(100, static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(CoherenceTable(s.a).mutual());
}
BENCHMARK(BM_CoherenceTable)->Arg(200)->Arg(800);

} // namespace
BENCHMARK_MAIN();
