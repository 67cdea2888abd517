#include "gepcc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gepcc/error.hpp"
#include "gepcc/metrics.hpp"

namespace gepcc::evolution {

void EvolutionConfig::validate() const {
    if (population_size < 2) throw ConfigError("population_size must be >= 2");
    if (elitism_count >= population_size) throw ConfigError("elitism_count must be below population_size");
    if (max_generations < 1) throw ConfigError("max_generations must be >= 1");
    if (stagnation_window < 1) throw ConfigError("stagnation_window must be >= 1");
    if (n_genes < 1) throw ConfigError("n_genes must be >= 1");
    const std::pair<const char*, double> rates[] = {
        {"mutation_rate", mutation_rate},
        {"inversion_rate", inversion_rate},
        {"is_transposition_rate", is_transposition_rate},
        {"ris_transposition_rate", ris_transposition_rate},
        {"gene_transposition_rate", gene_transposition_rate},
        {"one_point_recombination_rate", one_point_recombination_rate},
        {"two_point_recombination_rate", two_point_recombination_rate},
        {"gene_recombination_rate", gene_recombination_rate},
        {"dc_mutation_rate", dc_mutation_rate},
        {"constant_mutation_rate", constant_mutation_rate},
    };
    for (const auto& [name, rate] : rates) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    }
    if (threads < 0) throw ConfigError("threads must be >= 0");
    layout.validate();
}

void Samples::validate() const {
    if (columns.size() != variables.size()) throw DataError("samples: one column per variable required");
    for (std::size_t v = 0; v < columns.size(); ++v) {
        if (columns[v].size() != targets.size()) {
            throw DataError("samples: column " + variables[v] + " has " + std::to_string(columns[v].size()) +
                            " rows, expected " + std::to_string(targets.size()));
        }
        for (std::size_t i = 0; i < columns[v].size(); ++i) {
            if (!std::isfinite(columns[v][i])) {
                throw DataError("samples: non-finite " + variables[v] + " in row " + std::to_string(i + 1));
            }
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!std::isfinite(targets[i])) throw DataError("samples: non-finite target in row " + std::to_string(i + 1));
    }
}

double LinkedModel::predict(std::span<const double> bindings) const {
    double p = coefficients[0];
    for (std::size_t g = 0; g < gene_trees.size(); ++g) p += coefficients[g + 1] * expr::eval(gene_trees[g], bindings);
    return p;
}

std::vector<double> LinkedModel::predict(std::span<const std::vector<double>> columns, std::size_t rows) const {
    std::vector<double> p(rows, coefficients[0]);
    for (std::size_t g = 0; g < gene_trees.size(); ++g) {
        const auto out = expr::eval_columns(gene_trees[g], columns, rows);
        const double c = coefficients[g + 1];
        for (std::size_t i = 0; i < rows; ++i) p[i] += c * out[i];
    }
    return p;
}

std::string LinkedModel::equation() const {
    std::string s = expr::format_number(coefficients[0]);
    for (std::size_t g = 0; g < gene_trees.size(); ++g) {
        s += " + " + expr::format_number(coefficients[g + 1]) + " * " + expr::render_infix(gene_trees[g], variables);
    }
    return s;
}

std::string RunHistory::to_csv() const {
    std::ostringstream os;
    os << "generation,best_fitness,mean_fitness,best_train_rmse,best_valid_rmse\n";
    auto num = [](double v) { return std::isfinite(v) ? expr::format_number(v) : std::string("NA"); };
    for (const auto& r : records) {
        os << r.generation << ',' << num(r.best_fitness) << ',' << num(r.mean_fitness) << ','
           << num(r.best_train_rmse) << ',' << num(r.best_valid_rmse) << '\n';
    }
    return os.str();
}

std::vector<Individual> init_population(const EvolutionConfig& config, Rng& rng) {
    config.validate();
    std::vector<Individual> pop(config.population_size);
    for (auto& ind : pop) ind.chromosome = karva::random_chromosome(config.layout, config.n_genes, rng);
    return pop;
}

RouletteDraw select_roulette(std::span<const double> fitness, std::size_t count, Rng& rng) {
    RouletteDraw draw;
    draw.indices.reserve(count);
    if (fitness.empty()) return draw;

    std::vector<double> cumulative(fitness.size());
    double total = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        if (fitness[i] > 0.0) total += fitness[i];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) {
        draw.uniform_fallback = true;
        std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
        for (std::size_t k = 0; k < count; ++k) draw.indices.push_back(pick(rng));
        return draw;
    }
    std::uniform_real_distribution<double> spin(0.0, total);
    for (std::size_t k = 0; k < count; ++k) {
        const double u = spin(rng);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        // Skip any zero-width slots left at the end by rounding.
        while (it != cumulative.begin() && fitness[static_cast<std::size_t>(it - cumulative.begin())] <= 0.0) --it;
        draw.indices.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return draw;
}

std::vector<std::size_t> elite_indices(std::span<const Individual> population, std::size_t count) {
    std::vector<std::size_t> idx(population.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    count = std::min(count, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (population[a].fitness != population[b].fitness) {
                              return population[a].fitness > population[b].fitness;
                          }
                          return a < b;
                      });
    idx.resize(count);
    return idx;
}

std::pair<std::vector<Individual>, bool> select_with_elitism(std::span<const Individual> population,
                                                             std::size_t elitism_count, Rng& rng) {
    std::vector<Individual> next;
    next.reserve(population.size());
    for (std::size_t i : elite_indices(population, elitism_count)) next.push_back(population[i]);

    std::vector<double> fitness(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = population[i].fitness;
    const auto draw = select_roulette(fitness, population.size() - next.size(), rng);
    for (std::size_t i : draw.indices) next.push_back(population[i]);
    return {std::move(next), draw.uniform_fallback};
}

namespace {

void reproduce(std::vector<Individual>& next, std::size_t first, const EvolutionConfig& config, Rng& rng) {
    for (std::size_t i = first; i < next.size(); ++i) {
        Chromosome c = std::move(next[i].chromosome);
        c = mutate(std::move(c), config, rng);
        c = invert(std::move(c), config, rng);
        c = transpose_is(std::move(c), config, rng);
        c = transpose_ris(std::move(c), config, rng);
        c = transpose_gene(std::move(c), config, rng);
        next[i] = Individual{std::move(c), std::nullopt, 0.0, 0.0, false};
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = first; i + 1 < next.size(); i += 2) {
        Parents p{std::move(next[i].chromosome), std::move(next[i + 1].chromosome)};
        if (u(rng) < config.one_point_recombination_rate) p = recombine_one_point(std::move(p), rng);
        if (u(rng) < config.two_point_recombination_rate) p = recombine_two_point(std::move(p), rng);
        if (u(rng) < config.gene_recombination_rate) p = recombine_gene(std::move(p), rng);
        next[i].chromosome = std::move(p.first);
        next[i + 1].chromosome = std::move(p.second);
    }
}

double validation_rmse(const Individual& best, const Samples& validation) {
    if (!best.model || validation.rows() == 0) return expr::kNonFinite;
    const auto pred = best.model->predict(validation.columns, validation.rows());
    return metrics::rmse(validation.targets, pred);
}

}  // namespace

RunResult run_evolution(const EvolutionConfig& config, const Samples& training, const Samples& validation) {
    config.validate();
    training.validate();
    if (validation.rows() > 0) {
        validation.validate();
        if (validation.variables != training.variables) throw DataError("validation variables differ from training");
    }
    if (training.variables.size() != config.layout.n_variables) {
        throw ConfigError("layout declares " + std::to_string(config.layout.n_variables) + " variables, data has " +
                          std::to_string(training.variables.size()));
    }
    const std::size_t min_rows = 2 * (config.n_genes + 1);
    if (training.rows() < min_rows) {
        throw DataError("training needs at least " + std::to_string(min_rows) + " rows, got " +
                        std::to_string(training.rows()));
    }

    Rng rng(config.seed);
    auto population = init_population(config, rng);

    RunResult result;
    std::size_t since_improvement = 0;
    bool fallback = false;
    for (std::size_t gen = 0; gen < config.max_generations; ++gen) {
        evaluate_population(population, training, config);

        const auto best_idx = elite_indices(population, 1).front();
        const Individual& best = population[best_idx];
        if (!result.best.evaluated || best.fitness > result.best.fitness) {
            result.best = best;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }

        GenerationRecord rec;
        rec.generation = gen;
        rec.best_fitness = best.fitness;
        double sum = 0.0;
        for (const auto& ind : population) sum += ind.fitness;
        rec.mean_fitness = sum / static_cast<double>(population.size());
        rec.best_train_rmse = best.train_rmse;
        rec.best_valid_rmse = validation_rmse(best, validation);
        rec.uniform_fallback = fallback;
        result.history.records.push_back(rec);

        if (since_improvement >= config.stagnation_window || gen + 1 == config.max_generations) break;

        auto [next, uniform] = select_with_elitism(population, config.elitism_count, rng);
        fallback = uniform;
        reproduce(next, std::min(config.elitism_count, next.size()), config, rng);
        population = std::move(next);
    }

    if (!result.best.model) throw NumericError("no individual reached a finite fitness");
    return result;
}

}  // namespace gepcc::evolution
