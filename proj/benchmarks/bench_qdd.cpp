// Microbenchmarks for the hot paths: the exact piecewise integrator, the
// midpoint quadrature fallback, the double-integral Cramer split, the
// quadratic weak-stochastic scan, mixture quantile inversion, and the
// Gaussian closed forms.

#include "qdd/closed_forms.hpp"
#include "qdd/decompose.hpp"
#include "qdd/distribution.hpp"
#include "qdd/orders.hpp"
#include "qdd/validation.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

qdd::Distribution make_mixture(unsigned seed, int pieces) {
    std::mt19937_64 rng(seed);
    return qdd::testgen::random_uniform_mixture(rng, pieces);
}

const qdd::Distribution& normal_f() {
    static const qdd::Distribution d{qdd::Normal{0.3, 1.2}};
    return d;
}

const qdd::Distribution& normal_g() {
    static const qdd::Distribution d{qdd::Normal{-0.2, 0.8}};
    return d;
}

void BM_exact_polyline_avm(benchmark::State& state) {
    const auto f = make_mixture(1, static_cast<int>(state.range(0)));
    const auto g = make_mixture(2, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::avm_decompose(f, g));
}
BENCHMARK(BM_exact_polyline_avm)->Arg(5)->Arg(50);

void BM_quadrature_avm_normals(benchmark::State& state) {
    qdd::QuadratureConfig cfg;
    cfg.n_single = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::avm_decompose(normal_f(), normal_g(), cfg));
}
BENCHMARK(BM_quadrature_avm_normals)->Arg(1024)->Arg(4096);

void BM_quadrature_wd3_normals(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::wd_decompose(normal_f(), normal_g(), 3));
}
BENCHMARK(BM_quadrature_wd3_normals);

void BM_cramer_normals(benchmark::State& state) {
    qdd::QuadratureConfig cfg;
    cfg.n_double = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::cd_decompose(normal_f(), normal_g(), cfg));
}
BENCHMARK(BM_cramer_normals)->Arg(128)->Arg(512);

void BM_cramer_polylines(benchmark::State& state) {
    const auto f = make_mixture(3, 5);
    const auto g = make_mixture(4, 5);
    qdd::QuadratureConfig cfg;
    cfg.n_double = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::cd_decompose(f, g, cfg));
}
BENCHMARK(BM_cramer_polylines)->Arg(128)->Arg(512);

void BM_weak_stochastic_grid(benchmark::State& state) {
    const auto f = make_mixture(5, 5);
    const auto g = make_mixture(6, 5);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qdd::check_weak_stochastic(f, g, n));
}
BENCHMARK(BM_weak_stochastic_grid)->Arg(128)->Arg(256);

void BM_mixture_quantile(benchmark::State& state) {
    // A mixture with a Normal component keeps the bisection path alive
    // (all-piecewise mixtures compose to a Polyline up front).
    const qdd::Distribution d{qdd::Mixture{
        {{0.5, qdd::Distribution(qdd::Normal{0.0, 1.0})},
         {0.5, qdd::Distribution(qdd::Uniform{-2.0, 2.0})}}}};
    double tau = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qdd::quantile(d, tau));
        tau += 0.00097;
        if (tau >= 1.0) tau -= 0.998;
    }
}
BENCHMARK(BM_mixture_quantile);

void BM_normal_closed_forms(benchmark::State& state) {
    const qdd::NormalPair np{0.3, 1.2, -0.2, 0.8};
    for (auto _ : state) {
        benchmark::DoNotOptimize(qdd::normal_avm_decompose(np));
        benchmark::DoNotOptimize(qdd::normal_wdp_decompose(np, 3));
        benchmark::DoNotOptimize(qdd::normal_cd_decompose(np));
    }
}
BENCHMARK(BM_normal_closed_forms);

} // namespace

BENCHMARK_MAIN();
