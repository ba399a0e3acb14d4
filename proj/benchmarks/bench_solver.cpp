#include <benchmark/benchmark.h>

#include "flockdyn/convolution.hpp"
#include "flockdyn/solver.hpp"

using namespace flockdyn;

namespace {

ModelParams reference_params(int n) {
    ModelParams p;
    p.n = n;
    p.C = n == 3 ? 1.255 : 10.0 / 9.0;
    p.ell = n == 3 ? 0.8 : 0.75;
    p.k = n == 3 ? 0.2 : 0.5;
    return p;
}

void solve(benchmark::State& state) {
    const ModelParams p = reference_params(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_profile(p).R_star);
}

void closed_form(benchmark::State& state) {
    const FlockProfile prof = solve_profile(reference_params(static_cast<int>(state.range(0))));
    double r = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(convolution_closed(prof, r));
        r = r < prof.R_star * 0.99 ? r + 0.01 * prof.R_star : 0.0;
    }
}

void quadrature(benchmark::State& state) {
    const FlockProfile prof = solve_profile(reference_params(static_cast<int>(state.range(0))));
    const RadialDensity rho = prof.density();
    for (auto _ : state) benchmark::DoNotOptimize(convolution_quadrature(rho, prof.params, 0.5 * prof.R_star));
}

void verify(benchmark::State& state) {
    const FlockProfile prof = solve_profile(reference_params(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(verify_flock(prof, 256, 1).passed);
}

}  // namespace

BENCHMARK(solve)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);
BENCHMARK(closed_form)->Arg(2)->Arg(3);
BENCHMARK(quadrature)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);
BENCHMARK(verify)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
