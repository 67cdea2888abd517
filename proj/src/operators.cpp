#include <algorithm>
#include <array>
#include <random>

#include "gepcc/error.hpp"
#include "gepcc/evolution.hpp"

namespace gepcc::evolution {

namespace {

using karva::Gene;
using karva::GeneLayout;
using karva::Symbol;

constexpr std::array<std::size_t, 3> kTransposonLengths{1, 2, 3};

bool chance(double rate, Rng& rng) {
    if (rate <= 0.0) return false;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < rate;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(rng);
}

std::size_t transposon_length(Rng& rng) { return kTransposonLengths[uniform_index(kTransposonLengths.size(), rng)]; }

// Inserts `seq` at head position `at`; symbols pushed past the head are lost.
void insert_into_head(Gene& gene, std::size_t head_size, std::size_t at, const std::vector<Symbol>& seq) {
    std::vector<Symbol> head(gene.symbols.begin(), gene.symbols.begin() + static_cast<std::ptrdiff_t>(head_size));
    head.insert(head.begin() + static_cast<std::ptrdiff_t>(at), seq.begin(), seq.end());
    std::copy_n(head.begin(), head_size, gene.symbols.begin());
}

std::vector<Symbol> slice(const Gene& gene, std::size_t start, std::size_t length) {
    const std::size_t end = std::min(gene.symbols.size(), start + length);
    return {gene.symbols.begin() + static_cast<std::ptrdiff_t>(start),
            gene.symbols.begin() + static_cast<std::ptrdiff_t>(end)};
}

void check_shapes(const Parents& p) {
    const auto& a = p.first.genes;
    const auto& b = p.second.genes;
    if (a.size() != b.size()) throw ConfigError("recombination: parents have different gene counts");
    for (std::size_t g = 0; g < a.size(); ++g) {
        if (a[g].symbols.size() != b[g].symbols.size() || a[g].dc.size() != b[g].dc.size() ||
            a[g].constants.size() != b[g].constants.size()) {
            throw ConfigError("recombination: parents have different gene layouts");
        }
    }
}

// Positions of a chromosome laid end to end: per gene, head+tail symbols then
// the Dc indices. Constants tables are not part of the flat string.
std::size_t flat_length(const Chromosome& c) {
    std::size_t n = 0;
    for (const auto& g : c.genes) n += g.symbols.size() + g.dc.size();
    return n;
}

void swap_flat_range(Parents& p, std::size_t begin, std::size_t end) {
    std::size_t offset = 0;
    for (std::size_t g = 0; g < p.first.genes.size() && offset < end; ++g) {
        Gene& a = p.first.genes[g];
        Gene& b = p.second.genes[g];
        for (std::size_t i = 0; i < a.symbols.size(); ++i, ++offset) {
            if (offset >= begin && offset < end) std::swap(a.symbols[i], b.symbols[i]);
        }
        for (std::size_t i = 0; i < a.dc.size(); ++i, ++offset) {
            if (offset >= begin && offset < end) std::swap(a.dc[i], b.dc[i]);
        }
    }
}

}  // namespace

Chromosome mutate(Chromosome c, const EvolutionConfig& config, Rng& rng) {
    const GeneLayout& layout = config.layout;
    for (auto& gene : c.genes) {
        for (std::size_t i = 0; i < gene.symbols.size(); ++i) {
            if (chance(config.mutation_rate, rng)) gene.symbols[i] = karva::random_symbol(layout, i, rng);
        }
        for (auto& d : gene.dc) {
            if (chance(config.dc_mutation_rate, rng)) {
                d = static_cast<std::uint16_t>(uniform_index(layout.n_constants, rng));
            }
        }
        for (auto& k : gene.constants) {
            if (chance(config.constant_mutation_rate, rng)) k = karva::random_constant(layout, rng);
        }
    }
    return c;
}

Chromosome invert(Chromosome c, const EvolutionConfig& config, Rng& rng) {
    if (c.genes.empty() || !chance(config.inversion_rate, rng)) return c;
    Gene& gene = c.genes[uniform_index(c.genes.size(), rng)];
    const std::size_t head = config.layout.head_size;
    std::size_t a = uniform_index(head, rng);
    std::size_t b = uniform_index(head, rng);
    if (a > b) std::swap(a, b);
    std::reverse(gene.symbols.begin() + static_cast<std::ptrdiff_t>(a),
                 gene.symbols.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    return c;
}

Chromosome transpose_is(Chromosome c, const EvolutionConfig& config, Rng& rng) {
    if (c.genes.empty() || !chance(config.is_transposition_rate, rng)) return c;
    const std::size_t head = config.layout.head_size;
    const Gene& source = c.genes[uniform_index(c.genes.size(), rng)];
    const std::size_t start = uniform_index(source.symbols.size(), rng);
    const auto seq = slice(source, start, transposon_length(rng));
    Gene& target = c.genes[uniform_index(c.genes.size(), rng)];
    if (head < 2) return c;
    const std::size_t at = 1 + uniform_index(head - 1, rng);
    insert_into_head(target, head, at, seq);
    return c;
}

Chromosome transpose_ris(Chromosome c, const EvolutionConfig& config, Rng& rng) {
    if (c.genes.empty() || !chance(config.ris_transposition_rate, rng)) return c;
    const std::size_t head = config.layout.head_size;
    Gene& gene = c.genes[uniform_index(c.genes.size(), rng)];
    std::size_t start = uniform_index(head, rng);
    const std::size_t length = transposon_length(rng);
    while (start < head && gene.symbols[start].kind != Symbol::Kind::Function) ++start;
    if (start == head) return c;
    const auto seq = slice(gene, start, length);
    insert_into_head(gene, head, 0, seq);
    return c;
}

Chromosome transpose_gene(Chromosome c, const EvolutionConfig& config, Rng& rng) {
    if (c.genes.size() < 2 || !chance(config.gene_transposition_rate, rng)) return c;
    const std::size_t g = 1 + uniform_index(c.genes.size() - 1, rng);
    std::rotate(c.genes.begin(), c.genes.begin() + static_cast<std::ptrdiff_t>(g),
                c.genes.begin() + static_cast<std::ptrdiff_t>(g) + 1);
    return c;
}

Parents recombine_one_point(Parents p, Rng& rng) {
    check_shapes(p);
    const std::size_t n = flat_length(p.first);
    if (n < 2) return p;
    const std::size_t cut = 1 + uniform_index(n - 1, rng);
    swap_flat_range(p, cut, n);
    return p;
}

Parents recombine_two_point(Parents p, Rng& rng) {
    check_shapes(p);
    const std::size_t n = flat_length(p.first);
    if (n < 2) return p;
    std::size_t a = uniform_index(n + 1, rng);
    std::size_t b = uniform_index(n + 1, rng);
    if (a > b) std::swap(a, b);
    swap_flat_range(p, a, b);
    return p;
}

Parents recombine_gene(Parents p, Rng& rng) {
    check_shapes(p);
    if (p.first.genes.empty()) return p;
    const std::size_t g = uniform_index(p.first.genes.size(), rng);
    std::swap(p.first.genes[g], p.second.genes[g]);
    return p;
}

}  // namespace gepcc::evolution
