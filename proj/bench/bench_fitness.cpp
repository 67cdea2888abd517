// Population fitness evaluation: serial reference kernel vs the OpenMP kernel.
//
//   ./bench_fitness --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include "gepcc/dataset.hpp"
#include "gepcc/evolution.hpp"

namespace {

using namespace gepcc;

struct Fixture {
    evolution::EvolutionConfig config;
    evolution::Samples training;
    std::vector<evolution::Individual> population;

    Fixture(std::size_t pop, std::size_t rows, int threads) {
        config.population_size = pop;
        config.threads = threads;
        training = dataset::to_samples(dataset::synth_generate(dataset::SynthSpec{}, rows, 11));
        karva::Rng rng(11);
        population = evolution::init_population(config, rng);
    }
};

void BM_Serial(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state) {
        auto pop = f.population;
        evolution::evaluate_population_serial(pop, f.training, f.config);
        benchmark::DoNotOptimize(pop.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OpenMP(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)),
              static_cast<int>(state.range(2)));
    for (auto _ : state) {
        auto pop = f.population;
        evolution::evaluate_population(pop, f.training, f.config);
        benchmark::DoNotOptimize(pop.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->ArgNames({"pop", "rows"})->Args({100, 81})->Args({1000, 81})->Args({1000, 1000})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)->ArgNames({"pop", "rows", "threads"})
    ->Args({100, 81, 0})->Args({1000, 81, 0})->Args({1000, 1000, 0})
    ->Args({1000, 1000, 2})->Args({1000, 1000, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
