#include <benchmark/benchmark.h>

#include "flts/gb.hpp"
#include "flts/roughdata.hpp"

using namespace flts;

namespace {

GBState bench_state(int m) {
    RoughDataSpec spec;
    spec.s = 0.5;
    spec.M = m;
    spec.seed = 1;
    return generate(spec);
}

void BM_flts_step(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    GBState s = bench_state(m);
    const double tau = 1e-3;
    std::vector<Complex> u = to_u(s, tau, true).coeffs();
    detail::StepWorkspace ws(s.grid_ptr());
    for (auto _ : state) {
        detail::flts_step_coeffs(u, tau, true, true, ws);
        benchmark::DoNotOptimize(u.data());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_dft_roundtrip(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    auto g = make_grid(m);
    std::vector<Complex> values(m, Complex(0.5, -0.25));
    std::vector<Complex> coeffs(m);
    for (auto _ : state) {
        g->values_to_coeffs(values, coeffs);
        g->coeffs_to_values(coeffs, values);
        benchmark::DoNotOptimize(values.data());
    }
}

void BM_generate(benchmark::State& state) {
    RoughDataSpec spec;
    spec.s = 0.5;
    spec.M = static_cast<int>(state.range(0));
    spec.seed = 1;
    for (auto _ : state) {
        GBState s = generate(spec);
        benchmark::DoNotOptimize(s.z.coeffs().data());
    }
}

}  // namespace

BENCHMARK(BM_flts_step)->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK(BM_dft_roundtrip)->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK(BM_generate)->Arg(1 << 12);
