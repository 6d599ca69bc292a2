#include "nlch/closed_forms.hpp"
#include "nlch/conv_operator.hpp"
#include "nlch/initial_conditions.hpp"
#include "nlch/solver.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace nlch;

namespace {

std::shared_ptr<const Grid2D> grid(int n) {
    static std::map<int, std::shared_ptr<const Grid2D>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_shared<Grid2D>(
                                  tensor_grid(cheb_grid(n, 0, 1), cheb_grid(n, 0, 1)))).first;
    return it->second;
}

void BM_ClosedFormG(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        x += 1e-9;
        benchmark::DoNotOptimize(G_eps_square(0.25 + x, 0.6, 1e-3));
    }
}
BENCHMARK(BM_ClosedFormG);

void BM_Dilog(benchmark::State& state) {
    std::complex<double> z(0.72, 0.31);
    for (auto _ : state)
        benchmark::DoNotOptimize(dilog(z));
}
BENCHMARK(BM_Dilog);

void BM_AssembleRow(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const double alpha = static_cast<double>(state.range(1));
    auto g = grid(n);
    const Kernel k = Kernel::newtonian2d();
    const int mid = g->m() / 2 + n / 2;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            assemble_row(*g, mid, k, 1e-5, alpha, Partition::Mode::maximal));
    state.counters["points/elem"] = alpha * n * alpha * n;
}
BENCHMARK(BM_AssembleRow)->Args({20, 1})->Args({20, 4})->Args({20, 8})->Args({40, 4})
    ->Unit(benchmark::kMillisecond);

void BM_AssembleOperator(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto g = grid(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_operator(g, Kernel::newtonian2d(), 1e-5, 2.0,
                                                   Partition::Mode::maximal, true, 1));
    state.SetComplexityN(n);
}
BENCHMARK(BM_AssembleOperator)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SolverStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto g = grid(n);
    auto op = std::make_shared<ConvOperator>(assemble_operator(
        g, Kernel::newtonian2d(-50.0), 1e-5, 2.0, Partition::Mode::maximal, true, 1));
    ChSystem sys(g, op, Potential::logarithmic(2.0));
    const ChState st = sys.consistent_init(ic_wave(*g));
    SolverConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(ch_step(sys, st, 1e-6, 1, cfg));
}
BENCHMARK(BM_SolverStep)->Arg(20)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
