#include "gepcc/karva.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gepcc/error.hpp"

namespace gepcc::karva {

int GeneLayout::max_arity() const noexcept {
    int m = 0;
    for (auto f : functions) m = std::max(m, expr::arity(f));
    return m;
}

void GeneLayout::validate() const {
    if (head_size < 1) throw ConfigError("layout: head_size must be >= 1");
    if (functions.empty()) throw ConfigError("layout: function set is empty");
    expr::validate_function_set(functions);
    if (n_variables == 0 && dc_size == 0) throw ConfigError("layout: no terminals available");
    if (n_variables > 0xFFFF) throw ConfigError("layout: too many variables");
    // Worst case the head holds only max-arity functions.
    const std::size_t max_leaves = head_size * static_cast<std::size_t>(max_arity() - 1) + 1;
    if (tail_size < max_leaves) {
        throw ConfigError("layout: tail_size " + std::to_string(tail_size) + " is below head_size*(max_arity-1)+1 = " +
                          std::to_string(max_leaves));
    }
    if (dc_size > 0) {
        if (n_constants < 1) throw ConfigError("layout: n_constants must be >= 1 when dc_size > 0");
        if (n_constants > 0xFFFF) throw ConfigError("layout: too many constants");
        if (dc_size < max_leaves) {
            throw ConfigError("layout: dc_size " + std::to_string(dc_size) + " cannot cover " +
                              std::to_string(max_leaves) + " expressed constants");
        }
        if (!(constant_min <= constant_max) || !std::isfinite(constant_min) || !std::isfinite(constant_max)) {
            throw ConfigError("layout: invalid constant range");
        }
    }
}

namespace {

std::size_t terminal_count(const GeneLayout& layout) {
    return layout.n_variables + (layout.uses_constants() ? 1 : 0);
}

Symbol terminal(const GeneLayout& layout, std::size_t k) {
    return k < layout.n_variables ? Symbol::variable(k) : Symbol::constant();
}

int symbol_arity(const Symbol& s, const GeneLayout& layout) {
    return s.kind == Symbol::Kind::Function ? expr::arity(layout.functions[s.index]) : 0;
}

}  // namespace

Symbol random_symbol(const GeneLayout& layout, std::size_t position, Rng& rng) {
    const std::size_t terminals = terminal_count(layout);
    if (position < layout.head_size) {
        std::uniform_int_distribution<std::size_t> pick(0, layout.functions.size() + terminals - 1);
        const std::size_t k = pick(rng);
        if (k < layout.functions.size()) return Symbol::function(k);
        return terminal(layout, k - layout.functions.size());
    }
    std::uniform_int_distribution<std::size_t> pick(0, terminals - 1);
    return terminal(layout, pick(rng));
}

double random_constant(const GeneLayout& layout, Rng& rng) {
    std::uniform_real_distribution<double> d(layout.constant_min, layout.constant_max);
    return d(rng);
}

Gene random_gene(const GeneLayout& layout, Rng& rng) {
    layout.validate();
    Gene g;
    g.symbols.reserve(layout.symbol_count());
    for (std::size_t i = 0; i < layout.symbol_count(); ++i) g.symbols.push_back(random_symbol(layout, i, rng));
    if (layout.uses_constants()) {
        std::uniform_int_distribution<std::size_t> pick(0, layout.n_constants - 1);
        g.dc.reserve(layout.dc_size);
        for (std::size_t i = 0; i < layout.dc_size; ++i) g.dc.push_back(static_cast<std::uint16_t>(pick(rng)));
        g.constants.reserve(layout.n_constants);
        for (std::size_t i = 0; i < layout.n_constants; ++i) g.constants.push_back(random_constant(layout, rng));
    }
    return g;
}

Chromosome random_chromosome(const GeneLayout& layout, std::size_t n_genes, Rng& rng) {
    Chromosome c;
    c.genes.reserve(n_genes);
    for (std::size_t i = 0; i < n_genes; ++i) c.genes.push_back(random_gene(layout, rng));
    return c;
}

std::string to_string(const Violation& v) { return v.rule + " at " + std::to_string(v.position); }

std::optional<Violation> validate_gene(const Gene& gene, const GeneLayout& layout) {
    if (gene.symbols.size() != layout.symbol_count()) {
        return Violation{gene.symbols.size(), "head+tail length is " + std::to_string(gene.symbols.size()) +
                                                  ", expected " + std::to_string(layout.symbol_count())};
    }
    for (std::size_t i = 0; i < gene.symbols.size(); ++i) {
        const Symbol& s = gene.symbols[i];
        switch (s.kind) {
            case Symbol::Kind::Function:
                if (s.index >= layout.functions.size()) return Violation{i, "unknown function index"};
                if (i >= layout.head_size) return Violation{i, "function in tail"};
                break;
            case Symbol::Kind::Variable:
                if (s.index >= layout.n_variables) return Violation{i, "variable index out of range"};
                break;
            case Symbol::Kind::Constant:
                if (!layout.uses_constants()) return Violation{i, "constant symbol without Dc domain"};
                break;
        }
    }
    const std::size_t dc_start = layout.symbol_count();
    if (gene.dc.size() != layout.dc_size) {
        return Violation{dc_start, "Dc length is " + std::to_string(gene.dc.size()) + ", expected " +
                                       std::to_string(layout.dc_size)};
    }
    for (std::size_t i = 0; i < gene.dc.size(); ++i) {
        if (gene.dc[i] >= layout.n_constants) return Violation{dc_start + i, "Dc index out of range"};
    }
    const std::size_t expected_constants = layout.uses_constants() ? layout.n_constants : 0;
    if (gene.constants.size() != expected_constants) {
        return Violation{layout.gene_size(), "constants table has " + std::to_string(gene.constants.size()) +
                                                 " entries, expected " + std::to_string(expected_constants)};
    }
    for (std::size_t i = 0; i < gene.constants.size(); ++i) {
        if (!std::isfinite(gene.constants[i])) return Violation{layout.gene_size() + i, "non-finite constant"};
    }
    return std::nullopt;
}

std::optional<Violation> validate_chromosome(const Chromosome& c, const GeneLayout& layout,
                                             std::size_t n_genes) {
    if (c.genes.size() != n_genes) {
        return Violation{0, "chromosome has " + std::to_string(c.genes.size()) + " genes, expected " +
                                std::to_string(n_genes)};
    }
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        if (auto v = validate_gene(c.genes[g], layout)) {
            v->rule = "gene " + std::to_string(g) + ": " + v->rule;
            return v;
        }
    }
    return std::nullopt;
}

std::size_t expressed_length(const Gene& gene, const GeneLayout& layout) {
    std::size_t needed = 1;
    for (std::size_t i = 0; i < needed; ++i) needed += static_cast<std::size_t>(symbol_arity(gene.symbols[i], layout));
    return needed;
}

expr::Node decode_gene(const Gene& gene, const GeneLayout& layout) {
    const std::size_t length = expressed_length(gene, layout);

    // Children of position i occupy [first_child[i], first_child[i] + arity).
    std::vector<std::size_t> first_child(length, 0);
    std::vector<std::size_t> dc_slot(length, 0);
    std::size_t next = 1;
    std::size_t constants_seen = 0;
    for (std::size_t i = 0; i < length; ++i) {
        first_child[i] = next;
        next += static_cast<std::size_t>(symbol_arity(gene.symbols[i], layout));
        if (gene.symbols[i].kind == Symbol::Kind::Constant) dc_slot[i] = constants_seen++;
    }

    std::function<expr::Node(std::size_t)> build = [&](std::size_t i) -> expr::Node {
        const Symbol& s = gene.symbols[i];
        switch (s.kind) {
            case Symbol::Kind::Variable: return expr::Node::make_variable(s.index);
            case Symbol::Kind::Constant: return expr::Node::make_constant(gene.constants[gene.dc[dc_slot[i]]]);
            case Symbol::Kind::Function: break;
        }
        const expr::Function f = layout.functions[s.index];
        std::vector<expr::Node> children;
        children.reserve(static_cast<std::size_t>(expr::arity(f)));
        for (int k = 0; k < expr::arity(f); ++k) children.push_back(build(first_child[i] + static_cast<std::size_t>(k)));
        return expr::Node::make_function(f, std::move(children));
    };
    return build(0);
}

std::string symbol_token(const Symbol& s, const GeneLayout& layout, std::span<const std::string> variables) {
    switch (s.kind) {
        case Symbol::Kind::Function: return std::string(expr::name(layout.functions[s.index]));
        case Symbol::Kind::Variable: return variables[s.index];
        case Symbol::Kind::Constant: return "?";
    }
    return {};
}

namespace {

std::string join_symbols(const Gene& gene, std::size_t count, const GeneLayout& layout,
                         std::span<const std::string> variables) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += '.';
        out += symbol_token(gene.symbols[i], layout, variables);
    }
    return out;
}

}  // namespace

std::string k_expression(const Gene& gene, const GeneLayout& layout, std::span<const std::string> variables) {
    return join_symbols(gene, expressed_length(gene, layout), layout, variables);
}

std::string symbols_string(const Gene& gene, const GeneLayout& layout, std::span<const std::string> variables) {
    return join_symbols(gene, gene.symbols.size(), layout, variables);
}

std::vector<Symbol> parse_symbols(std::string_view text, const GeneLayout& layout,
                                  std::span<const std::string> variables) {
    std::vector<Symbol> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t dot = text.find('.', start);
        const std::string_view tok = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
        if (tok == "?") {
            out.push_back(Symbol::constant());
        } else if (auto v = std::find(variables.begin(), variables.end(), tok); v != variables.end()) {
            out.push_back(Symbol::variable(static_cast<std::size_t>(v - variables.begin())));
        } else {
            auto f = expr::function_from_name(tok);
            auto it = f ? std::find(layout.functions.begin(), layout.functions.end(), *f) : layout.functions.end();
            if (it == layout.functions.end()) throw DataError("unknown gene symbol '" + std::string(tok) + "'");
            out.push_back(Symbol::function(static_cast<std::size_t>(it - layout.functions.begin())));
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return out;
}

}  // namespace gepcc::karva
