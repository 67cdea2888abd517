#include <cmath>
#include <cstddef>

#include "gepcc/error.hpp"
#include "gepcc/evolution.hpp"
#include "gepcc/metrics.hpp"
#include "gepcc/ols.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gepcc::evolution {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Individual unfit(Individual ind) {
    ind.model.reset();
    ind.fitness = 0.0;
    ind.train_rmse = expr::kNonFinite;
    ind.evaluated = true;
    return ind;
}

}  // namespace

Individual evaluate_fitness(Individual ind, const Samples& training, const EvolutionConfig& config) {
    const std::size_t rows = training.rows();

    LinkedModel model;
    model.variables = training.variables;
    std::vector<std::vector<double>> outputs;
    outputs.reserve(ind.chromosome.genes.size());
    for (const auto& gene : ind.chromosome.genes) {
        model.gene_trees.push_back(karva::decode_gene(gene, config.layout));
        outputs.push_back(expr::eval_columns(model.gene_trees.back(), training.columns, rows));
        if (!all_finite(outputs.back())) return unfit(std::move(ind));
    }

    OlsFit fit;
    try {
        fit = ols_link(outputs, training.targets);
    } catch (const DataError&) {
        return unfit(std::move(ind));
    }
    model.coefficients = std::move(fit.coefficients);
    model.rank_deficient = fit.rank_deficient;
    if (!all_finite(model.coefficients)) return unfit(std::move(ind));

    // Same summation order as LinkedModel::predict so stored models
    // reproduce these values exactly.
    std::vector<double> predictions(rows, model.coefficients[0]);
    for (std::size_t g = 0; g < outputs.size(); ++g) {
        const double c = model.coefficients[g + 1];
        for (std::size_t i = 0; i < rows; ++i) predictions[i] += c * outputs[g][i];
    }

    const double err = metrics::rmse(training.targets, predictions);
    if (!std::isfinite(err)) return unfit(std::move(ind));

    ind.model = std::move(model);
    ind.train_rmse = err;
    ind.fitness = 1.0 / (1.0 + err);
    ind.evaluated = true;
    return ind;
}

void evaluate_population_serial(std::span<Individual> population, const Samples& training,
                                const EvolutionConfig& config) {
    for (auto& ind : population) {
        if (!ind.evaluated) ind = evaluate_fitness(std::move(ind), training, config);
    }
}

void evaluate_population(std::span<Individual> population, const Samples& training,
                         const EvolutionConfig& config) {
    const auto n = static_cast<std::ptrdiff_t>(population.size());
#ifdef _OPENMP
    const int threads = config.threads;
#pragma omp parallel for schedule(dynamic, 4) if (threads != 1) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& ind = population[static_cast<std::size_t>(i)];
        if (!ind.evaluated) ind = evaluate_fitness(std::move(ind), training, config);
    }
}

}  // namespace gepcc::evolution
