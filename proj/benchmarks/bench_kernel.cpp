#include "modkam/jackson.hpp"
#include "modkam/kernel.hpp"

#include <benchmark/benchmark.h>

using namespace modkam;

static void BM_KernelMoments(benchmark::State& state) {
    auto K = build_kernel(1);
    for (auto _ : state)
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; b <= 3; ++b) benchmark::DoNotOptimize(kernel_moments(*K, {a}, {b}, 3));
}
BENCHMARK(BM_KernelMoments);

static void BM_Smooth(benchmark::State& state) {
    TorusFunction f = synthesize_ck_function(2, 0.5, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(smooth(f, 1.0 / 64.0));
}
BENCHMARK(BM_Smooth)->Arg(1024)->Arg(8192);

static void BM_SmoothByConvolution(benchmark::State& state) {
    auto K = build_kernel(1);
    TorusFunction f = synthesize_ck_function(2, 0.5, 256);
    std::vector<double> x = {0.0, 0.25, 0.5, 0.75};
    for (auto _ : state) benchmark::DoNotOptimize(smooth_by_convolution(*K, f, 1.0 / 32.0, x));
}
BENCHMARK(BM_SmoothByConvolution);
