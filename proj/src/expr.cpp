#include "gepcc/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>
#include <unordered_set>

#include "gepcc/error.hpp"

namespace gepcc::expr {

namespace {

struct FunctionInfo {
    Function function;
    std::string_view name;
    int arity;
};

constexpr std::array<FunctionInfo, 9> kFunctions{{
    {Function::Add, "+", 2},
    {Function::Sub, "-", 2},
    {Function::Mul, "*", 2},
    {Function::Div, "/", 2},
    {Function::Exp, "exp", 1},
    {Function::Ln, "ln", 1},
    {Function::Inv, "inv", 1},
    {Function::Log10, "log10", 1},
    {Function::Neg, "neg", 1},
}};

const FunctionInfo& info(Function f) noexcept { return kFunctions[static_cast<std::size_t>(f)]; }

}  // namespace

int arity(Function f) noexcept { return info(f).arity; }

std::string_view name(Function f) noexcept { return info(f).name; }

std::optional<Function> function_from_name(std::string_view symbol) noexcept {
    for (const auto& fi : kFunctions) {
        if (fi.name == symbol) return fi.function;
    }
    return std::nullopt;
}

std::vector<Function> default_function_set() {
    return {Function::Add, Function::Sub, Function::Mul, Function::Div,
            Function::Exp, Function::Ln,  Function::Inv};
}

void validate_function_set(std::span<const Function> set) {
    std::unordered_set<std::string_view> seen;
    for (Function f : set) {
        if (!seen.insert(name(f)).second) {
            throw ConfigError("duplicate function '" + std::string(name(f)) + "' in function set");
        }
    }
}

double apply(Function f, double a, double b) noexcept {
    switch (f) {
        case Function::Add: return a + b;
        case Function::Sub: return a - b;
        case Function::Mul: return a * b;
        case Function::Div: return b == 0.0 ? kNonFinite : a / b;
        case Function::Exp: return std::exp(a);
        case Function::Ln: return a > 0.0 ? std::log(a) : kNonFinite;
        case Function::Inv: return a == 0.0 ? kNonFinite : 1.0 / a;
        case Function::Log10: return a > 0.0 ? std::log10(a) : kNonFinite;
        case Function::Neg: return -a;
    }
    return kNonFinite;
}

Node Node::make_function(Function f, std::vector<Node> children) {
    Node n;
    n.kind = Kind::Function;
    n.function = f;
    n.children = std::move(children);
    return n;
}

Node Node::make_variable(std::size_t index) {
    Node n;
    n.kind = Kind::Variable;
    n.variable = index;
    return n;
}

Node Node::make_constant(double value) {
    Node n;
    n.kind = Kind::Constant;
    n.value = value;
    return n;
}

void validate(const Node& tree, std::size_t n_variables) {
    switch (tree.kind) {
        case Node::Kind::Function:
            if (tree.children.size() != static_cast<std::size_t>(arity(tree.function))) {
                throw std::invalid_argument("function '" + std::string(name(tree.function)) + "' has " +
                                            std::to_string(tree.children.size()) + " children");
            }
            for (const auto& c : tree.children) validate(c, n_variables);
            return;
        case Node::Kind::Variable:
            if (tree.variable >= n_variables) {
                throw std::invalid_argument("variable index " + std::to_string(tree.variable) +
                                            " out of range");
            }
            break;
        case Node::Kind::Constant:
            break;
    }
    if (!tree.children.empty()) throw std::invalid_argument("terminal node with children");
}

std::size_t depth(const Node& tree) noexcept {
    std::size_t d = 0;
    for (const auto& c : tree.children) d = std::max(d, depth(c));
    return d + 1;
}

std::size_t size(const Node& tree) noexcept {
    std::size_t s = 1;
    for (const auto& c : tree.children) s += size(c);
    return s;
}

double eval(const Node& tree, std::span<const double> bindings) noexcept {
    switch (tree.kind) {
        case Node::Kind::Constant: return tree.value;
        case Node::Kind::Variable: return bindings[tree.variable];
        case Node::Kind::Function:
            if (tree.children.size() == 1) return apply(tree.function, eval(tree.children[0], bindings));
            return apply(tree.function, eval(tree.children[0], bindings), eval(tree.children[1], bindings));
    }
    return kNonFinite;
}

std::vector<double> eval_columns(const Node& tree, std::span<const std::vector<double>> columns,
                                 std::size_t rows) {
    switch (tree.kind) {
        case Node::Kind::Constant: return std::vector<double>(rows, tree.value);
        case Node::Kind::Variable: {
            const auto& col = columns[tree.variable];
            return std::vector<double>(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(rows));
        }
        case Node::Kind::Function: break;
    }
    auto lhs = eval_columns(tree.children[0], columns, rows);
    if (tree.children.size() == 1) {
        for (auto& v : lhs) v = apply(tree.function, v);
        return lhs;
    }
    const auto rhs = eval_columns(tree.children[1], columns, rows);
    for (std::size_t i = 0; i < rows; ++i) lhs[i] = apply(tree.function, lhs[i], rhs[i]);
    return lhs;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        const std::size_t start = i_;
        if (i_ >= text_.size()) return {Tok::End, {}, start};
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
                ++i_;
            }
            return {Tok::Ident, text_.substr(start, i_ - start), start};
        }
        ++i_;
        switch (c) {
            case '+': return {Tok::Plus, text_.substr(start, 1), start};
            case '-': return {Tok::Minus, text_.substr(start, 1), start};
            case '*': return {Tok::Star, text_.substr(start, 1), start};
            case '/': return {Tok::Slash, text_.substr(start, 1), start};
            case '^': return {Tok::Caret, text_.substr(start, 1), start};
            case '(': return {Tok::LParen, text_.substr(start, 1), start};
            case ')': return {Tok::RParen, text_.substr(start, 1), start};
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (i_ < text_.size() && text_[i_] == '.') {
            ++i_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
            std::size_t j = i_ + 1;
            if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
            if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
                i_ = j;
                digits();
            }
        }
        return {Tok::Number, text_.substr(start, i_ - start), start};
    }

    std::string_view text_;
    std::size_t i_ = 0;
};

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> variables)
        : lexer_(text), variables_(variables) {
        advance();
    }

    Node parse() {
        Node n = expr();
        if (cur_.kind != Tok::End) fail("unexpected '" + std::string(cur_.text) + "'");
        return n;
    }

private:
    void advance() {
        cur_ = peeked_ ? *peeked_ : lexer_.next();
        peeked_.reset();
    }

    const Token& peek() {
        if (!peeked_) peeked_ = lexer_.next();
        return *peeked_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        if (cur_.kind == Tok::End) throw ParseError("unexpected end of input", cur_.pos);
        throw ParseError(what, cur_.pos);
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        advance();
    }

    Node expr() {
        Node lhs = term();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            const Function f = cur_.kind == Tok::Plus ? Function::Add : Function::Sub;
            advance();
            Node rhs = term();
            lhs = Node::make_function(f, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Node term() {
        Node lhs = factor();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
            const Function f = cur_.kind == Tok::Star ? Function::Mul : Function::Div;
            advance();
            Node rhs = factor();
            lhs = Node::make_function(f, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Node factor() {
        Node base = unary();
        if (cur_.kind != Tok::Caret) return base;
        advance();
        if (cur_.kind != Tok::Number) fail("expected integer exponent");
        unsigned exponent = 0;
        const auto* first = cur_.text.data();
        const auto* last = first + cur_.text.size();
        auto [ptr, ec] = std::from_chars(first, last, exponent);
        if (ec != std::errc{} || ptr != last || exponent < 1) fail("exponent must be an integer >= 1");
        advance();
        Node result = base;
        for (unsigned k = 1; k < exponent; ++k) {
            result = Node::make_function(Function::Mul, {std::move(result), base});
        }
        return result;
    }

    Node unary() {
        switch (cur_.kind) {
            case Tok::Number: {
                Node n = Node::make_constant(number_value(cur_));
                advance();
                return n;
            }
            case Tok::Minus: {
                advance();
                if (cur_.kind == Tok::Number && peek().kind != Tok::Caret) {
                    Node n = Node::make_constant(-number_value(cur_));
                    advance();
                    return n;
                }
                return Node::make_function(Function::Neg, {factor()});
            }
            case Tok::LParen: {
                advance();
                Node n = expr();
                expect(Tok::RParen, "')'");
                return n;
            }
            case Tok::Ident: return identifier();
            default: fail("expected operand");
        }
    }

    Node identifier() {
        const Token id = cur_;
        advance();
        if (cur_.kind == Tok::LParen) {
            auto f = function_from_name(id.text);
            if (!f || arity(*f) != 1) throw UnknownIdentifierError(std::string(id.text), id.pos);
            advance();
            Node arg = expr();
            expect(Tok::RParen, "')'");
            return Node::make_function(*f, {std::move(arg)});
        }
        auto it = std::find(variables_.begin(), variables_.end(), id.text);
        if (it == variables_.end()) throw UnknownIdentifierError(std::string(id.text), id.pos);
        return Node::make_variable(static_cast<std::size_t>(it - variables_.begin()));
    }

    double number_value(const Token& t) const {
        double v = 0.0;
        const auto* first = t.text.data();
        const auto* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw ParseError("malformed number", t.pos);
        return v;
    }

    Lexer lexer_;
    std::span<const std::string> variables_;
    Token cur_{Tok::End, {}, 0};
    std::optional<Token> peeked_;
};

void render(const Node& n, std::span<const std::string> vars, bool bare, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Constant: out += format_number(n.value); return;
        case Node::Kind::Variable: out += vars[n.variable]; return;
        case Node::Kind::Function: break;
    }
    if (n.function == Function::Neg) {
        const bool literal = n.children[0].kind == Node::Kind::Constant;
        out += literal ? "(-(" : "(-";
        render(n.children[0], vars, false, out);
        out += literal ? "))" : ")";
        return;
    }
    if (arity(n.function) == 1) {
        out += name(n.function);
        out += '(';
        render(n.children[0], vars, true, out);
        out += ')';
        return;
    }
    if (!bare) out += '(';
    render(n.children[0], vars, false, out);
    out += ' ';
    out += name(n.function);
    out += ' ';
    render(n.children[1], vars, false, out);
    if (!bare) out += ')';
}

}  // namespace

Node parse_formula(std::string_view text, std::span<const std::string> variables) {
    return Parser(text, variables).parse();
}

std::string render_infix(const Node& tree, std::span<const std::string> variables) {
    std::string out;
    render(tree, variables, false, out);
    return out;
}

}  // namespace gepcc::expr
