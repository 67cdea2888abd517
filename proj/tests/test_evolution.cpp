#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "gepcc/error.hpp"
#include "gepcc/evolution.hpp"
#include "gepcc/metrics.hpp"

using namespace gepcc;
using namespace gepcc::evolution;
using karva::Gene;
using karva::Symbol;

namespace {

Samples make_samples(std::size_t rows, std::uint64_t seed, double (*target)(double, double, double)) {
    Samples s;
    s.variables = {"x1", "x2", "x3"};
    s.columns.assign(3, std::vector<double>(rows));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& c : s.columns) c[i] = u(rng);
        s.targets.push_back(target(s.columns[0][i], s.columns[1][i], s.columns[2][i]));
    }
    return s;
}

double linear(double x1, double, double) { return x1; }
double product_sum(double x1, double x2, double x3) { return x1 * x2 + x3; }

// Gene whose root is `root`, every other position the variable x1.
Gene gene_with_root(const EvolutionConfig& cfg, Symbol root, Symbol child = Symbol::variable(0)) {
    Gene g;
    g.symbols.assign(cfg.layout.symbol_count(), child);
    g.symbols[0] = root;
    g.dc.assign(cfg.layout.dc_size, 0);
    g.constants.assign(cfg.layout.n_constants, 1.0);
    return g;
}

bool all_valid(const Chromosome& c, const EvolutionConfig& cfg) {
    return !karva::validate_chromosome(c, cfg.layout, cfg.n_genes);
}

std::size_t function_index(const EvolutionConfig& cfg, expr::Function f) {
    const auto& fs = cfg.layout.functions;
    return static_cast<std::size_t>(std::find(fs.begin(), fs.end(), f) - fs.begin());
}

}  // namespace

TEST_CASE("config validation") {
    EvolutionConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = EvolutionConfig{};
    cfg.mutation_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = EvolutionConfig{};
    cfg.elitism_count = cfg.population_size;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("population initialisation") {
    EvolutionConfig cfg;
    cfg.population_size = 50;
    Rng a(4), b(4);
    const auto p = init_population(cfg, a);
    CHECK(p.size() == 50);
    for (const auto& ind : p) CHECK(all_valid(ind.chromosome, cfg));
    const auto q = init_population(cfg, b);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i].chromosome == q[i].chromosome);
    CHECK(p[0].chromosome != p[1].chromosome);
}

TEST_CASE("fitness evaluation") {
    EvolutionConfig cfg;
    const auto data = make_samples(40, 1, linear);

    SUBCASE("exact gene gives fitness 1") {
        Individual ind;
        ind.chromosome.genes = {gene_with_root(cfg, Symbol::variable(0)), gene_with_root(cfg, Symbol::variable(1)),
                                gene_with_root(cfg, Symbol::variable(2))};
        const auto out = evaluate_fitness(ind, data, cfg);
        CHECK(out.evaluated);
        REQUIRE(out.model);
        CHECK(out.train_rmse < 1e-12);
        CHECK(out.fitness == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("log of negative inputs gives fitness 0") {
        Individual ind;
        ind.chromosome.genes = {
            gene_with_root(cfg, Symbol::function(function_index(cfg, expr::Function::Ln))),
            gene_with_root(cfg, Symbol::variable(1)), gene_with_root(cfg, Symbol::variable(2))};
        const auto out = evaluate_fitness(ind, data, cfg);
        CHECK(out.evaluated);
        CHECK_FALSE(out.model);
        CHECK(out.fitness == 0.0);
    }
    SUBCASE("random chromosomes land in (0, 1] or exactly 0") {
        Rng rng(17);
        for (int i = 0; i < 1000; ++i) {
            Individual ind;
            ind.chromosome = karva::random_chromosome(cfg.layout, cfg.n_genes, rng);
            const auto out = evaluate_fitness(ind, data, cfg);
            const bool ok = out.fitness == 0.0 || (out.fitness > 0.0 && out.fitness <= 1.0);
            CHECK(ok);
            CHECK(out.model.has_value() == (out.fitness > 0.0));
        }
    }
}

TEST_CASE("linked fitness does not depend on gene order") {
    EvolutionConfig cfg;
    const auto data = make_samples(60, 2, product_sum);
    Rng rng(23);
    int compared = 0;
    for (int i = 0; i < 300; ++i) {
        Individual ind;
        ind.chromosome = karva::random_chromosome(cfg.layout, cfg.n_genes, rng);
        const auto a = evaluate_fitness(ind, data, cfg);
        std::reverse(ind.chromosome.genes.begin(), ind.chromosome.genes.end());
        const auto b = evaluate_fitness(ind, data, cfg);
        CHECK(a.model.has_value() == b.model.has_value());
        if (!a.model || a.model->rank_deficient) continue;
        ++compared;
        CHECK(std::fabs(a.fitness - b.fitness) <= 1e-10);
    }
    CHECK(compared > 30);
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
    EvolutionConfig cfg;
    cfg.population_size = 200;
    const auto data = make_samples(81, 3, product_sum);
    Rng rng(5);
    auto serial = init_population(cfg, rng);
    auto parallel = serial;
    evaluate_population_serial(serial, data, cfg);
    for (int threads : {1, 2, 4}) {
        auto p = parallel;
        cfg.threads = threads;
        evaluate_population(p, data, cfg);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::memcmp(&p[i].fitness, &serial[i].fitness, sizeof(double)) == 0);
            CHECK(p[i].model.has_value() == serial[i].model.has_value());
            if (p[i].model) CHECK(p[i].model->coefficients == serial[i].model->coefficients);
        }
    }
}

TEST_CASE("roulette selection") {
    Rng rng(6);
    const std::vector<double> one{0.0, 1.0, 0.0};
    const auto d1 = select_roulette(one, 1000, rng);
    CHECK_FALSE(d1.uniform_fallback);
    CHECK(std::all_of(d1.indices.begin(), d1.indices.end(), [](std::size_t i) { return i == 1; }));

    const std::vector<double> w{3.0, 1.0};
    const auto d2 = select_roulette(w, 100000, rng);
    const auto zeros = std::count(d2.indices.begin(), d2.indices.end(), std::size_t{0});
    CHECK(std::fabs(static_cast<double>(zeros) / 100000.0 - 0.75) < 0.01);

    const std::vector<double> none{0.0, 0.0, 0.0};
    const auto d3 = select_roulette(none, 3000, rng);
    CHECK(d3.uniform_fallback);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::count(d3.indices.begin(), d3.indices.end(), k) > 800);
}

TEST_CASE("elitism keeps the best individual unchanged") {
    EvolutionConfig cfg;
    const auto data = make_samples(40, 4, linear);
    Rng rng(8);
    auto pop = init_population(cfg, rng);
    evaluate_population(pop, data, cfg);
    const auto best = elite_indices(pop, 1).front();
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(pop[i].fitness <= pop[best].fitness);
    auto [next, fallback] = select_with_elitism(pop, 1, rng);
    CHECK_FALSE(fallback);
    CHECK(next.size() == pop.size());
    CHECK(next[0].chromosome == pop[best].chromosome);
    CHECK(std::memcmp(&next[0].fitness, &pop[best].fitness, sizeof(double)) == 0);

    std::vector<Individual> tied(3);
    for (auto& t : tied) t.fitness = 0.5;
    CHECK(elite_indices(tied, 2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("operators at rate zero are the identity") {
    EvolutionConfig cfg;
    cfg.mutation_rate = cfg.dc_mutation_rate = cfg.constant_mutation_rate = 0.0;
    cfg.inversion_rate = cfg.is_transposition_rate = cfg.ris_transposition_rate = 0.0;
    cfg.gene_transposition_rate = 0.0;
    Rng rng(9);
    const auto c = karva::random_chromosome(cfg.layout, 3, rng);
    CHECK(mutate(c, cfg, rng) == c);
    CHECK(invert(c, cfg, rng) == c);
    CHECK(transpose_is(c, cfg, rng) == c);
    CHECK(transpose_ris(c, cfg, rng) == c);
    CHECK(transpose_gene(c, cfg, rng) == c);
}

TEST_CASE("full-rate mutation keeps the tail terminal") {
    EvolutionConfig cfg;
    cfg.mutation_rate = 1.0;
    Rng rng(10);
    for (int i = 0; i < 100; ++i) {
        const auto c = mutate(karva::random_chromosome(cfg.layout, 3, rng), cfg, rng);
        for (const auto& g : c.genes) {
            for (std::size_t p = cfg.layout.head_size; p < g.symbols.size(); ++p) CHECK(g.symbols[p].is_terminal());
        }
        CHECK(all_valid(c, cfg));
    }
}

TEST_CASE("operator details") {
    EvolutionConfig cfg;
    cfg.inversion_rate = cfg.is_transposition_rate = cfg.ris_transposition_rate = 1.0;
    cfg.gene_transposition_rate = 1.0;
    Rng rng(11);
    const std::size_t h = cfg.layout.head_size;
    for (int i = 0; i < 1000; ++i) {
        const auto c = karva::random_chromosome(cfg.layout, 3, rng);

        const auto inv = invert(c, cfg, rng);
        for (std::size_t g = 0; g < 3; ++g) {
            auto a = std::vector<Symbol>(c.genes[g].symbols.begin(), c.genes[g].symbols.begin() + h);
            auto b = std::vector<Symbol>(inv.genes[g].symbols.begin(), inv.genes[g].symbols.begin() + h);
            auto key = [](const Symbol& s) { return std::pair(static_cast<int>(s.kind), s.index); };
            std::sort(a.begin(), a.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
            std::sort(b.begin(), b.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
            CHECK(a == b);
            CHECK(std::equal(c.genes[g].symbols.begin() + h, c.genes[g].symbols.end(), inv.genes[g].symbols.begin() + h));
        }

        for (const auto& t : {transpose_is(c, cfg, rng), transpose_ris(c, cfg, rng)}) {
            for (std::size_t g = 0; g < 3; ++g) {
                CHECK(std::equal(c.genes[g].symbols.begin() + h, c.genes[g].symbols.end(),
                                 t.genes[g].symbols.begin() + h));
                CHECK(c.genes[g].dc == t.genes[g].dc);
                CHECK(c.genes[g].constants == t.genes[g].constants);
            }
        }
        const auto ris = transpose_ris(c, cfg, rng);
        const bool changed = ris != c;
        if (changed) {
            bool root_function = false;
            for (const auto& g : ris.genes) root_function |= g.symbols[0].kind == Symbol::Kind::Function;
            CHECK(root_function);
        }

        const auto moved = transpose_gene(c, cfg, rng);
        auto sorted_a = c.genes, sorted_b = moved.genes;
        CHECK(std::is_permutation(sorted_a.begin(), sorted_a.end(), sorted_b.begin(), sorted_b.end()));
        CHECK(moved.genes[0] != c.genes[0]);
        CHECK(std::find(c.genes.begin() + 1, c.genes.end(), moved.genes[0]) != c.genes.end());
    }
}

TEST_CASE("RIS without a function in the scanned head region is a no-op") {
    EvolutionConfig cfg;
    cfg.n_genes = 1;
    cfg.ris_transposition_rate = 1.0;
    Chromosome c;
    c.genes = {gene_with_root(cfg, Symbol::variable(1))};
    Rng rng(12);
    for (int i = 0; i < 50; ++i) CHECK(transpose_ris(c, cfg, rng) == c);
}

TEST_CASE("recombination") {
    EvolutionConfig cfg;
    Rng rng(13);
    const auto a = karva::random_chromosome(cfg.layout, 3, rng);
    const auto b = karva::random_chromosome(cfg.layout, 3, rng);

    for (int i = 0; i < 20; ++i) {
        auto same = recombine_one_point({a, a}, rng);
        CHECK((same.first == a && same.second == a));
        same = recombine_two_point({a, a}, rng);
        CHECK((same.first == a && same.second == a));
        same = recombine_gene({a, a}, rng);
        CHECK((same.first == a && same.second == a));
    }

    Chromosome one_a, one_b;
    one_a.genes = {a.genes[0]};
    one_b.genes = {b.genes[0]};
    const auto swapped = recombine_gene({one_a, one_b}, rng);
    CHECK(swapped.first == one_b);
    CHECK(swapped.second == one_a);

    // Positions are exchanged, never duplicated or lost.
    const auto kids = recombine_two_point({a, b}, rng);
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t p = 0; p < a.genes[g].symbols.size(); ++p) {
            const auto& x = kids.first.genes[g].symbols[p];
            const auto& y = kids.second.genes[g].symbols[p];
            const bool kept = x == a.genes[g].symbols[p] && y == b.genes[g].symbols[p];
            const bool swap = x == b.genes[g].symbols[p] && y == a.genes[g].symbols[p];
            CHECK((kept || swap));
        }
    }

    Chromosome two;
    two.genes = {a.genes[0], a.genes[1]};
    CHECK_THROWS_AS(recombine_one_point({a, two}, rng), ConfigError);
}

TEST_CASE("every operator preserves validity over 10000 applications") {
    EvolutionConfig cfg;
    cfg.mutation_rate = 0.2;
    cfg.dc_mutation_rate = cfg.constant_mutation_rate = 0.2;
    cfg.inversion_rate = cfg.is_transposition_rate = cfg.ris_transposition_rate = 1.0;
    cfg.gene_transposition_rate = 1.0;
    Rng rng(14);
    auto c = karva::random_chromosome(cfg.layout, 3, rng);
    auto d = karva::random_chromosome(cfg.layout, 3, rng);
    for (int i = 0; i < 10000; ++i) {
        c = mutate(c, cfg, rng);
        REQUIRE(all_valid(c, cfg));
        c = invert(c, cfg, rng);
        REQUIRE(all_valid(c, cfg));
        c = transpose_is(c, cfg, rng);
        REQUIRE(all_valid(c, cfg));
        c = transpose_ris(c, cfg, rng);
        REQUIRE(all_valid(c, cfg));
        c = transpose_gene(c, cfg, rng);
        REQUIRE(all_valid(c, cfg));
        auto p = recombine_one_point({c, d}, rng);
        REQUIRE((all_valid(p.first, cfg) && all_valid(p.second, cfg)));
        p = recombine_two_point(std::move(p), rng);
        REQUIRE((all_valid(p.first, cfg) && all_valid(p.second, cfg)));
        p = recombine_gene(std::move(p), rng);
        REQUIRE((all_valid(p.first, cfg) && all_valid(p.second, cfg)));
        c = std::move(p.first);
        d = std::move(p.second);
    }
}

TEST_CASE("run_evolution") {
    EvolutionConfig cfg;
    cfg.max_generations = 40;
    cfg.seed = 21;
    const auto train = make_samples(100, 5, linear);
    const auto valid = make_samples(30, 6, linear);

    const auto a = run_evolution(cfg, train, valid);
    const auto b = run_evolution(cfg, train, valid);
    CHECK(a.best.chromosome == b.best.chromosome);
    CHECK(a.history.to_csv() == b.history.to_csv());
    REQUIRE(a.best.model);
    CHECK(a.history.records.size() <= 40);
    for (std::size_t i = 1; i < a.history.records.size(); ++i) {
        CHECK(a.history.records[i].best_fitness >= a.history.records[i - 1].best_fitness);
    }
    const auto pred = a.best.model->predict(train.columns, train.rows());
    CHECK(*metrics::r_squared({train.targets, pred}) >= 0.999);
    CHECK(a.history.to_csv().rfind("generation,best_fitness,mean_fitness,best_train_rmse,best_valid_rmse\n", 0) == 0);

    auto short_data = make_samples(7, 1, linear);
    CHECK_THROWS_AS(run_evolution(cfg, short_data, valid), DataError);
    auto two_vars = train;
    two_vars.variables.pop_back();
    two_vars.columns.pop_back();
    CHECK_THROWS_AS(run_evolution(cfg, two_vars, {}), ConfigError);
}

TEST_CASE("stagnation stops the run early") {
    EvolutionConfig cfg;
    cfg.max_generations = 500;
    cfg.stagnation_window = 5;
    cfg.population_size = 20;
    const auto train = make_samples(30, 7, linear);
    const auto r = run_evolution(cfg, train, {});
    CHECK(r.history.records.size() < 500);
    CHECK(std::isnan(r.history.records.back().best_valid_rmse));
    CHECK(r.history.to_csv().find(",NA\n") != std::string::npos);
}
