#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "amodelay/delay_models.hpp"
#include "amodelay/dense_eigen.hpp"
#include "amodelay/mz_reduce.hpp"
#include "amodelay/params.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/spectral.hpp"

using namespace amodelay;

namespace {

const ModelCoeffs kCoeffs = derive_coeffs(PhysicalParams{});

void BM_PdeStep(benchmark::State& state) {
    const Grid g{static_cast<int>(state.range(0)), 1e-4};
    FieldState s = init_gaussian(g, {});
    for (auto _ : state) {
        s = step(s, kCoeffs, g, ModelVariant::two_layer);
        benchmark::DoNotOptimize(s.T1.data());
    }
    state.SetItemsProcessed(state.iterations() * g.N);
}
BENCHMARK(BM_PdeStep)->Arg(400)->Arg(2000);

void BM_DelayModel(benchmark::State& state) {
    const Grid g{400, 0.0025};
    const DelaySystem sys = make_delay_system(kCoeffs, static_cast<DelayVariant>(state.range(0)), 1.0 / 400);
    WarmupOptions wo;
    wo.spacing = sys.variant == DelayVariant::difference ? g.dt : sys.eps / 10;
    const HistoryBuffer base = warmup_history(kCoeffs, g, init_gaussian(g, {}), wo);
    IntegrateOptions io;
    io.t_end = 20.0;
    for (auto _ : state) {
        HistoryBuffer h = base;
        benchmark::DoNotOptimize(integrate_dde(h, sys, io).size());
    }
}
BENCHMARK(BM_DelayModel)
    ->Arg(static_cast<int>(DelayVariant::difference))
    ->Arg(static_cast<int>(DelayVariant::dde_moc))
    ->Arg(static_cast<int>(DelayVariant::dde_mz))
    ->Unit(benchmark::kMillisecond);

void BM_DenseQr(benchmark::State& state) {
    const Eigen::MatrixXd M = build_system_matrix(kCoeffs, static_cast<int>(state.range(0)), ModelVariant::two_layer);
    DenseEigenOptions o;
    o.residuals = false;
    for (auto _ : state) benchmark::DoNotOptimize(dense_eigensolver(M, o).values.size());
}
BENCHMARK(BM_DenseQr)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Psd(benchmark::State& state) {
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.01 * i) + 0.3 * std::sin(0.37 * i);
    for (auto _ : state) benchmark::DoNotOptimize(psd(x, 0.01).peaks.size());
}
BENCHMARK(BM_Psd)->Arg(4000)->Arg(80000);

void BM_MemoryKernel(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    double s = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(memory_kernel(kCoeffs, N, s));
        s = s < 30 ? s + 0.1 : 0.5;
    }
}
BENCHMARK(BM_MemoryKernel)->Arg(16)->Arg(2000);

void BM_KernelOracle(benchmark::State& state) {
    const KernelOracle oracle(kCoeffs, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(oracle.kernel(1.3)(0, 0));
}
BENCHMARK(BM_KernelOracle)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
