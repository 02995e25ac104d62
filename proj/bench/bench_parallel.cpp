// OpenMP kernels against their serial references. The jobs argument is the
// thread count; results are identical for every value.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "fmatch/estimator.hpp"
#include "fmatch/experiment.hpp"
#include "fmatch/selection.hpp"
#include "fmatch/simulation.hpp"

namespace {

using namespace fmatch;

std::vector<BootstrapWorld> make_worlds() {
    const SeriesSample s(simulate_arma(ArmaSpec{{0.75, -0.5}, {}, 1.0}, 500, 1));
    std::vector<BootstrapWorld> worlds;
    for (std::size_t p = 0; p <= 6; ++p) worlds.push_back(make_bootstrap_world(s, fit_match(s, p, 1)));
    return worlds;
}

ExperimentPlan headline_plan() {
    ExperimentPlan plan;
    plan.truth = ArmaSpec{{0.8}, {-0.5}, 1.0};
    plan.n = 400;
    plan.replicates = 200;
    plan.base_seed = 2024;
    plan.estimators = {{EstimatorKind::Match, 1, 1}, {EstimatorKind::Match, 1, 5}};
    return plan;
}

void BM_BootstrapSerial(benchmark::State& state) {
    const auto worlds = make_worlds();
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_replicates_serial(worlds, 50, 7, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(worlds.size() * 50));
}

void BM_BootstrapParallel(benchmark::State& state) {
    const auto worlds = make_worlds();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_replicates(worlds, 50, 7, {}, jobs));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(worlds.size() * 50));
}

void BM_ExperimentSerial(benchmark::State& state) {
    const auto plan = headline_plan();
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(plan));
}

void BM_ExperimentParallel(benchmark::State& state) {
    const auto plan = headline_plan();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(plan, jobs));
}

void thread_counts(benchmark::internal::Benchmark* b) {
    const int max = omp_get_num_procs();
    for (int j = 1; j < max; j *= 2) b->Arg(j);
    b->Arg(max);
}

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExperimentParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
