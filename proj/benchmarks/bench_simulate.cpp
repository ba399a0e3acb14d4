#include <vector>

#include <benchmark/benchmark.h>

#include "flockdyn/simulate.hpp"

using namespace flockdyn;

namespace {

SimConfig config(int n, int N, ForceMode mode) {
    ModelParams p;
    p.n = n;
    p.C = n == 3 ? 1.255 : 10.0 / 9.0;
    p.ell = n == 3 ? 0.8 : 0.75;
    p.k = n == 3 ? 0.2 : 0.5;
    SimConfig c;
    c.dimension = n;
    c.potential = QuasiMorse{p};
    c.N = N;
    c.force_mode = mode;
    return c;
}

void forces(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int N = static_cast<int>(state.range(1));
    const Simulator sim(config(n, N, static_cast<ForceMode>(state.range(2))));
    const ParticleState s = sim.initial_state();
    std::vector<double> out;
    for (auto _ : state) {
        sim.forces(s, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(N) * (N - 1) / 2);
    state.SetComplexityN(N);
}

void energy(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const Simulator sim(config(3, N, ForceMode::Tabulated));
    const ParticleState s = sim.initial_state();
    for (auto _ : state) benchmark::DoNotOptimize(sim.interaction_energy(s));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(N) * (N - 1) / 2);
}

void first_order_step(benchmark::State& state) {
    Simulator sim(config(3, static_cast<int>(state.range(0)), ForceMode::Tabulated));
    ParticleState s = sim.initial_state();
    for (auto _ : state) benchmark::DoNotOptimize(sim.step(s));
}

void pair_table(benchmark::State& state) {
    ModelParams p;
    p.C = 1.255;
    p.ell = 0.8;
    p.k = 0.2;
    const PotentialSpec spec = QuasiMorse{p};
    const PairTable table(spec, 1e-6, potential_range(spec), 512);
    double q = 1e-6;
    double sink = 0.0;
    for (auto _ : state) {
        sink += table.force_over_r(q);
        q = q < 100.0 ? q * 1.013 : 1e-6;
    }
    benchmark::DoNotOptimize(sink);
}

}  // namespace

BENCHMARK(forces)
    ->ArgsProduct({{2, 3}, {250, 500, 1000, 2000}, {static_cast<long>(ForceMode::Tabulated)}})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);
BENCHMARK(forces)->Args({3, 500, static_cast<long>(ForceMode::Exact)})->Unit(benchmark::kMillisecond);
BENCHMARK(energy)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(first_order_step)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(pair_table);
BENCHMARK_MAIN();
