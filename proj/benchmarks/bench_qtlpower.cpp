#include <array>
#include <string>

#include <benchmark/benchmark.h>

#include "qtlpower/adjustments.hpp"
#include "qtlpower/power_engine.hpp"
#include "qtlpower/special_functions.hpp"
#include "qtlpower/stattests.hpp"
#include "qtlpower/trait_sim.hpp"

using namespace qtlpower;

static void BM_FSurvival(benchmark::State& state) {
    double f = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f_sf(f, 2.0, 97.0));
        f = f > 20.0 ? 0.1 : f + 0.37;
    }
}
BENCHMARK(BM_FSurvival);

static void BM_ChiSquareSurvival(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(chi_square_sf(x, 2.0));
        x = x > 20.0 ? 0.1 : x + 0.37;
    }
}
BENCHMARK(BM_ChiSquareSurvival);

static void BM_SimulateDataset(benchmark::State& state) {
    StudyConfig config;
    config.n_subjects = static_cast<int>(state.range(0));
    RandomStream rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_dataset(config, rng, 0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDataset)->Arg(100)->Arg(1000);

static void BM_AnalyzeReplicate(benchmark::State& state) {
    const auto method = static_cast<Method>(state.range(0));
    StudyConfig config;
    RandomStream rng(2);
    const Dataset dataset = simulate_dataset(config, rng, 0);
    const TestKind kind = method == Method::TreatmentCovariate ? TestKind::CovariateAnova : TestKind::Anova;
    for (auto _ : state) {
        const auto sample = apply_method(method, dataset, LocationEstimator::Mean);
        benchmark::DoNotOptimize(run_test(kind, sample));
    }
    state.SetLabel(std::string(method_name(method)));
}
BENCHMARK(BM_AnalyzeReplicate)->DenseRange(0, static_cast<int>(kAllMethods.size()) - 1);

static void BM_KruskalWallis(benchmark::State& state) {
    StudyConfig config;
    config.family = Family::Lognormal;
    RandomStream rng(3);
    const Dataset dataset = simulate_dataset(config, rng, 0);
    const auto sample = apply_method(Method::AllUnderlying, dataset, LocationEstimator::Median);
    for (auto _ : state) benchmark::DoNotOptimize(kruskal_wallis(sample));
}
BENCHMARK(BM_KruskalWallis);

static void BM_RunCell(benchmark::State& state) {
    StudyConfig config;
    config.n_replicates = 1000;
    const auto methods = default_methods(Family::Normal);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_cell(config, methods, 0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RunCell)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
