#include "modkam/regularity.hpp"

#include <benchmark/benchmark.h>

using namespace modkam;

static void BM_DiniConvergent(benchmark::State& state) {
    ModulusSpec m = ModulusSpec::log_hoelder(1.5);
    for (auto _ : state) benchmark::DoNotOptimize(dini_integral(m, 6, 2.0));
}
BENCHMARK(BM_DiniConvergent);

static void BM_DiniDivergent(benchmark::State& state) {
    ModulusSpec m = ModulusSpec::log_hoelder(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(dini_integral(m, 6, 2.0));
}
BENCHMARK(BM_DiniDivergent);

static void BM_RemainingModulus(benchmark::State& state) {
    PhiFunction phi = phi_from_modulus(ModulusSpec::log_hoelder(1.5), 6, 2.0, 1);
    auto grid = default_log_gamma_grid(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(remaining_modulus_log(phi, 1, 0.5, grid));
}
BENCHMARK(BM_RemainingModulus)->Unit(benchmark::kMillisecond);
