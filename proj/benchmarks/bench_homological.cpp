#include "modkam/diophantine.hpp"
#include "modkam/kam.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace modkam;

static void BM_SolveHomological(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TorusFunction g(2, N);
    for (int a = -(N / 2 - 1); a < N / 2; ++a)
        for (int b = 0; b < N / 2; ++b) {
            if (b == 0 && a <= 0) continue;
            cplx c(u(rng), u(rng));
            g.set_coeff({a, b}, c);
            g.set_coeff({-a, -b}, std::conj(c));
        }
    const auto w = golden_frequency();
    for (auto _ : state) benchmark::DoNotOptimize(solve_homological(g, w));
    state.SetComplexityN(N * N);
}
BENCHMARK(BM_SolveHomological)->RangeMultiplier(2)->Range(16, 256)->Complexity();
