#include <benchmark/benchmark.h>

#include "flockdyn/specfun.hpp"

using namespace flockdyn;

namespace {

template <double (*F)(BesselOrder, double)>
void bessel(benchmark::State& state) {
    const BesselOrder nu = BesselOrder::from_twice(static_cast<int>(state.range(0)));
    double x = 0.01;
    double sink = 0.0;
    for (auto _ : state) {
        sink += F(nu, x);
        x = x < 60.0 ? x * 1.07 : 0.01;
    }
    benchmark::DoNotOptimize(sink);
}

void ratio(benchmark::State& state) {
    double x = 0.01;
    double sink = 0.0;
    for (auto _ : state) {
        sink += ratio_k_over_xk(BesselOrder::integer(0), x);
        x = x < 60.0 ? x * 1.07 : 0.01;
    }
    benchmark::DoNotOptimize(sink);
}

}  // namespace

BENCHMARK(bessel<bessel_j>)->Name("bessel_j")->Arg(0)->Arg(1)->Arg(2);
BENCHMARK(bessel<bessel_i_scaled>)->Name("bessel_i_scaled")->Arg(0)->Arg(1)->Arg(2);
BENCHMARK(bessel<bessel_k_scaled>)->Name("bessel_k_scaled")->Arg(0)->Arg(1)->Arg(2);
BENCHMARK(ratio);
