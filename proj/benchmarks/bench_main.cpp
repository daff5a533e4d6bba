#include <benchmark/benchmark.h>

#include "flowlab/expr.hpp"
#include "flowlab/matrix.hpp"
#include "flowlab/planar.hpp"
#include "flowlab/quadric.hpp"
#include "flowlab/tensor_rep.hpp"

namespace {

using namespace flowlab;

const SquareMatrix kC{{0.3, -1.1}, {0.7, 0.4}};

void BM_Exp2Closed(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        t += 1e-3;
        benchmark::DoNotOptimize(exp2_closed(kC, t));
    }
}
BENCHMARK(BM_Exp2Closed);

void BM_ExpSeries2(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        t += 1e-3;
        benchmark::DoNotOptimize(exp_series(kC, t));
    }
}
BENCHMARK(BM_ExpSeries2);

void BM_Classify(benchmark::State& state) {
    const planar::LinearField2 f{kC, std::nullopt};
    for (auto _ : state) benchmark::DoNotOptimize(planar::classify(f));
}
BENCHMARK(BM_Classify);

void BM_ParseEval(benchmark::State& state) {
    const expr::Expr e = expr::parse("u - v - u*(u^2+v^2)");
    for (auto _ : state) benchmark::DoNotOptimize(expr::eval(e, {0.3, 0.8}));
}
BENCHMARK(BM_ParseEval);

void BM_Rk4Step(benchmark::State& state) {
    const expr::Field2 f = expr::preset("demo:limit-cycle");
    Vec2 u{0.1, 0.0};
    for (auto _ : state) {
        u = expr::rk4_flow(f, u, 1e-3, 1);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_Rk4Step);

void BM_ExpB(benchmark::State& state) {
    const auto g = quadric::QuadricGroup::preset("lorentz");
    const quadric::AxisField axis{{0.3, 0.2, 0.8}};
    const SquareMatrix b = quadric::b_matrix(g, axis);
    const double eps = quadric::epsilon(g, axis);
    double t = 0.0;
    for (auto _ : state) {
        t += 1e-3;
        benchmark::DoNotOptimize(quadric::exp_b(b, eps, t));
    }
}
BENCHMARK(BM_ExpB);

void BM_InducedGenerator12(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(rep::symmetric_reduce(rep::induced_generator(kC, {1, 2, true})));
}
BENCHMARK(BM_InducedGenerator12);

} // namespace

BENCHMARK_MAIN();
