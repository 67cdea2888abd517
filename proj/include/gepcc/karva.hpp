#pragma once

// Fixed-length Karva genes: a head (functions or terminals), a tail
// (terminals only) and a Dc domain of indices into a per-gene table of random
// numerical constants. Genes decode breadth-first into expression trees.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gepcc/expr.hpp"

namespace gepcc::karva {

using Rng = std::mt19937_64;

struct GeneLayout {
    std::size_t head_size = 8;
    std::size_t tail_size = 17;
    std::size_t dc_size = 17;
    std::size_t n_variables = 3;
    std::size_t n_constants = 10;
    double constant_min = -10.0;
    double constant_max = 10.0;
    std::vector<expr::Function> functions = expr::default_function_set();

    int max_arity() const noexcept;
    std::size_t symbol_count() const noexcept { return head_size + tail_size; }
    std::size_t gene_size() const noexcept { return head_size + tail_size + dc_size; }
    bool uses_constants() const noexcept { return dc_size > 0; }

    /// Throws ConfigError when the layout cannot guarantee closure.
    void validate() const;

    friend bool operator==(const GeneLayout&, const GeneLayout&) = default;
};

/// One position of the head/tail string.
struct Symbol {
    enum class Kind : std::uint8_t { Function, Variable, Constant };

    Kind kind = Kind::Variable;
    /// Index into GeneLayout::functions or the variable index; unused for '?'.
    std::uint16_t index = 0;

    static Symbol function(std::size_t i) { return {Kind::Function, static_cast<std::uint16_t>(i)}; }
    static Symbol variable(std::size_t i) { return {Kind::Variable, static_cast<std::uint16_t>(i)}; }
    static Symbol constant() { return {Kind::Constant, 0}; }

    bool is_terminal() const noexcept { return kind != Kind::Function; }

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Gene {
    std::vector<Symbol> symbols;
    std::vector<std::uint16_t> dc;
    std::vector<double> constants;

    friend bool operator==(const Gene&, const Gene&) = default;
};

struct Chromosome {
    std::vector<Gene> genes;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct Violation {
    std::size_t position;
    std::string rule;
};

/// "function in tail at 20"
std::string to_string(const Violation& v);

Gene random_gene(const GeneLayout& layout, Rng& rng);
Chromosome random_chromosome(const GeneLayout& layout, std::size_t n_genes, Rng& rng);

/// Draws a symbol allowed at `position` (any symbol in the head, terminals in
/// the tail).
Symbol random_symbol(const GeneLayout& layout, std::size_t position, Rng& rng);
double random_constant(const GeneLayout& layout, Rng& rng);

/// Returns the first broken invariant, or nothing when the gene is valid.
/// Positions index the gene as a whole: head, tail, then Dc.
std::optional<Violation> validate_gene(const Gene& gene, const GeneLayout& layout);
std::optional<Violation> validate_chromosome(const Chromosome& c, const GeneLayout& layout,
                                             std::size_t n_genes);

/// Number of leading symbols read by breadth-first decoding.
std::size_t expressed_length(const Gene& gene, const GeneLayout& layout);

/// Breadth-first decode. Each '?' in the expressed region takes the next Dc
/// index in reading order.
expr::Node decode_gene(const Gene& gene, const GeneLayout& layout);

/// Symbol text used in k-expressions: function name, variable name or "?".
std::string symbol_token(const Symbol& s, const GeneLayout& layout,
                         std::span<const std::string> variables);

/// The expressed prefix, dot separated, e.g. "+.*.a.b.a".
std::string k_expression(const Gene& gene, const GeneLayout& layout,
                         std::span<const std::string> variables);

/// Every head and tail symbol, dot separated.
std::string symbols_string(const Gene& gene, const GeneLayout& layout,
                           std::span<const std::string> variables);

/// Inverse of symbols_string(). Throws DataError on unknown tokens.
std::vector<Symbol> parse_symbols(std::string_view text, const GeneLayout& layout,
                                  std::span<const std::string> variables);

}  // namespace gepcc::karva
