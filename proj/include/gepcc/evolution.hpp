#pragma once

// Gene expression programming search: multigene chromosomes linked by a
// least-squares fitted linear combination, roulette-wheel selection with
// elitism and the GEP operator suite.
//
// Every random draw happens on the calling thread in a fixed order, so a
// seed fixes a whole run. Fitness evaluation is the only parallel stage and
// its results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gepcc/expr.hpp"
#include "gepcc/karva.hpp"

namespace gepcc::evolution {

using karva::Chromosome;
using karva::Rng;

struct EvolutionConfig {
    std::size_t population_size = 100;
    std::size_t max_generations = 500;
    std::size_t stagnation_window = 100;
    std::size_t elitism_count = 1;

    // Conventional GEP rates.
    double mutation_rate = 0.044;
    double inversion_rate = 0.1;
    double is_transposition_rate = 0.1;
    double ris_transposition_rate = 0.1;
    double gene_transposition_rate = 0.277;
    double one_point_recombination_rate = 0.3;
    double two_point_recombination_rate = 0.3;
    double gene_recombination_rate = 0.277;
    double dc_mutation_rate = 0.044;
    double constant_mutation_rate = 0.01;

    std::uint64_t seed = 1;
    karva::GeneLayout layout;
    std::size_t n_genes = 3;

    /// OpenMP threads for fitness evaluation; 0 uses the runtime default.
    int threads = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Column-major training or validation table.
struct Samples {
    std::vector<std::string> variables;
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;

    std::size_t rows() const noexcept { return targets.size(); }

    /// Shape and finiteness check; throws DataError.
    void validate() const;
};

/// prediction(x) = c0 + sum_g c_g * gene_g(x)
struct LinkedModel {
    std::vector<expr::Node> gene_trees;
    std::vector<double> coefficients;
    std::vector<std::string> variables;
    bool rank_deficient = false;

    double predict(std::span<const double> bindings) const;
    std::vector<double> predict(std::span<const std::vector<double>> columns, std::size_t rows) const;

    /// Closed form, e.g. "0.5 + 2 * (LL + PL) + ...".
    std::string equation() const;
};

struct Individual {
    Chromosome chromosome;
    std::optional<LinkedModel> model;
    double fitness = 0.0;
    double train_rmse = 0.0;
    bool evaluated = false;
};

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_train_rmse = 0.0;
    double best_valid_rmse = 0.0;
    /// Selection fell back to uniform sampling (no positive fitness).
    bool uniform_fallback = false;
};

struct RunHistory {
    std::vector<GenerationRecord> records;

    /// Header: generation,best_fitness,mean_fitness,best_train_rmse,best_valid_rmse
    std::string to_csv() const;
};

struct RunResult {
    Individual best;
    RunHistory history;
};

// --- population and fitness -------------------------------------------------

std::vector<Individual> init_population(const EvolutionConfig& config, Rng& rng);

/// Decodes the genes, evaluates them on the training rows and links them by
/// least squares. Any non-finite gene output or prediction gives fitness 0
/// and no model; otherwise fitness = 1 / (1 + train RMSE).
Individual evaluate_fitness(Individual individual, const Samples& training, const EvolutionConfig& config);

/// Reference kernel: evaluates every not-yet-evaluated individual in order.
void evaluate_population_serial(std::span<Individual> population, const Samples& training,
                                const EvolutionConfig& config);

/// OpenMP kernel. Bit-identical to evaluate_population_serial.
void evaluate_population(std::span<Individual> population, const Samples& training,
                         const EvolutionConfig& config);

// --- selection --------------------------------------------------------------

struct RouletteDraw {
    std::vector<std::size_t> indices;
    bool uniform_fallback = false;
};

/// Fitness-proportional sampling with replacement. Falls back to uniform
/// sampling when no fitness is positive.
RouletteDraw select_roulette(std::span<const double> fitness, std::size_t count, Rng& rng);

/// Indices of the `count` fittest individuals, best first; ties go to the
/// lower index.
std::vector<std::size_t> elite_indices(std::span<const Individual> population, std::size_t count);

/// Next-generation parents: the elites copied unchanged, then roulette draws
/// up to the population size.
std::pair<std::vector<Individual>, bool> select_with_elitism(std::span<const Individual> population,
                                                             std::size_t elitism_count, Rng& rng);

// --- operators --------------------------------------------------------------

Chromosome mutate(Chromosome c, const EvolutionConfig& config, Rng& rng);
/// Reverses a random segment of one gene's head (the "rotation" operator).
Chromosome invert(Chromosome c, const EvolutionConfig& config, Rng& rng);
Chromosome transpose_is(Chromosome c, const EvolutionConfig& config, Rng& rng);
Chromosome transpose_ris(Chromosome c, const EvolutionConfig& config, Rng& rng);
Chromosome transpose_gene(Chromosome c, const EvolutionConfig& config, Rng& rng);

using Parents = std::pair<Chromosome, Chromosome>;

/// Recombinations exchange like positions only, so children stay valid.
/// Parents with different shapes throw ConfigError.
Parents recombine_one_point(Parents parents, Rng& rng);
Parents recombine_two_point(Parents parents, Rng& rng);
Parents recombine_gene(Parents parents, Rng& rng);

// --- run --------------------------------------------------------------------

/// Full search. `validation` may have zero rows; it is only reported, never
/// used for selection. Throws DataError for unusable data and NumericError
/// if no individual ever reaches a finite fitness.
RunResult run_evolution(const EvolutionConfig& config, const Samples& training, const Samples& validation);

}  // namespace gepcc::evolution
