#include "modkam/kam.hpp"

#include <benchmark/benchmark.h>

using namespace modkam;

static void BM_KamStep(benchmark::State& state) {
    ExampleParams p;
    p.omega = golden_frequency();
    HamiltonianModel model = build_example_hamiltonian(ModelKind::log_hoelder_example, p);
    KamConfig cfg;
    cfg.lattice = static_cast<int>(state.range(0));
    HamiltonianModel h0 = approximate_sequence(model, 0);
    TorusMap start = TorusMap::identity(2, cfg.lattice);
    for (auto _ : state) benchmark::DoNotOptimize(kam_step(h0, start, p.omega, cfg.theta, step_scale(model, 0), cfg));
}
BENCHMARK(BM_KamStep)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
