#include <benchmark/benchmark.h>

#include <msgt/charmap.hpp>
#include <msgt/inclusion.hpp>
#include <msgt/integrate.hpp>
#include <msgt/registry.hpp>
#include <msgt/smallgain.hpp>

using namespace msgt;

namespace {

void BM_ExpressionEval(benchmark::State& state) {
    const Expression p = Expression::parse("x1*(2*x1^2 - 9*x1 + 12)", 1);
    const std::vector<double> x{1.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.eval(x, 0.0));
    }
}
BENCHMARK(BM_ExpressionEval);

void BM_EquilibriaAtInput(benchmark::State& state) {
    const SystemDef z = require_system("sec5-z");
    for (auto _ : state) {
        benchmark::DoNotOptimize(equilibria_at_input(z, 4.5));
    }
}
BENCHMARK(BM_EquilibriaAtInput);

void BM_IntegrateRelaxation(benchmark::State& state) {
    const SystemDef z = require_system("sec5-z");
    const std::vector<double> z0{0.0};
    const InputSignal u = InputSignal::constant(4.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(z, z0, u, 10.0, {}));
    }
}
BENCHMARK(BM_IntegrateRelaxation);

void BM_IterateZorro(benchmark::State& state) {
    const auto map = make_zorro(1.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(iterate_paths(*map, 0.45, 120, 10'000));
    }
}
BENCHMARK(BM_IterateZorro);

void BM_LoopFixedPoints(benchmark::State& state) {
    const Interconnection ex = require_interconnection("sec5-positive-form");
    const auto loop = compose_maps(characteristic_kw(ex), characteristic_ky(ex));
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_fixed_points(*loop, 2.5, 8.0, 512, 1e-9));
    }
}
BENCHMARK(BM_LoopFixedPoints);

void BM_CardinalityProfile(benchmark::State& state) {
    const CharacteristicMap k2(require_system("sec5-z"), false, Interval{0.0, 50.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(cardinality_profile(k2, 0.0, 6.0, 121));
    }
}
BENCHMARK(BM_CardinalityProfile);

void BM_VerifyRunningExample(benchmark::State& state) {
    const Interconnection ic = require_interconnection("sec5-original");
    VerificationBudget budget;
    budget.loop_grid_w = 3;
    budget.loop_grid_h = 3;
    budget.t_final = 20.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_hypotheses(ic, budget));
    }
}
BENCHMARK(BM_VerifyRunningExample);

}  // namespace

BENCHMARK_MAIN();
