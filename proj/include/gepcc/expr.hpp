#pragma once

// Expression trees over indexed variables and real constants, their
// evaluation, and a small infix formula language.
//
// Evaluation never traps: division by zero, inv(0), ln/log10 of a
// non-positive argument and exp overflow yield a non-finite value which
// propagates to the result.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gepcc::expr {

inline constexpr double kNonFinite = std::numeric_limits<double>::quiet_NaN();

enum class Function : std::uint8_t { Add, Sub, Mul, Div, Exp, Ln, Inv, Log10, Neg };

int arity(Function f) noexcept;

/// Symbol used in k-expressions and formulas: "+", "-", "*", "/", "exp", "ln",
/// "inv", "log10", "neg".
std::string_view name(Function f) noexcept;

std::optional<Function> function_from_name(std::string_view symbol) noexcept;

/// {+, -, *, /, exp, ln, inv}: the evolutionary default. log10 and neg are
/// parser-only.
std::vector<Function> default_function_set();

/// Checks that every name in `set` is unique. Throws ConfigError otherwise.
void validate_function_set(std::span<const Function> set);

double apply(Function f, double a, double b = 0.0) noexcept;

struct Node {
    enum class Kind : std::uint8_t { Function, Variable, Constant };

    Kind kind = Kind::Constant;
    Function function = Function::Add;
    std::size_t variable = 0;
    double value = 0.0;
    std::vector<Node> children;

    static Node make_function(Function f, std::vector<Node> children);
    static Node make_variable(std::size_t index);
    static Node make_constant(double value);

    bool is_function() const noexcept { return kind == Kind::Function; }

    friend bool operator==(const Node&, const Node&) = default;
};

/// Structural check: arity of every function node and variable bounds.
/// Throws std::invalid_argument describing the first violation.
void validate(const Node& tree, std::size_t n_variables);

std::size_t depth(const Node& tree) noexcept;
std::size_t size(const Node& tree) noexcept;

/// Evaluates `tree` at one point. `bindings[i]` is the value of variable i.
double eval(const Node& tree, std::span<const double> bindings) noexcept;

/// Evaluates `tree` on every row of a column-major table; `columns[i]` holds
/// variable i and every column has `rows` entries. Element-wise identical to
/// calling eval() on each row.
std::vector<double> eval_columns(const Node& tree, std::span<const std::vector<double>> columns,
                                 std::size_t rows);

/// Parses the infix grammar
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' INT)?
///   unary  := FUNC '(' expr ')' | '(' expr ')' | IDENT | NUMBER | '-' factor
///
/// with FUNC one of exp, ln, log10, inv, neg. `x^n` expands to n-1 left
/// associated multiplications. A '-' directly applied to a bare literal is
/// folded into a negative constant.
///
/// Throws ParseError (syntax) or UnknownIdentifierError.
Node parse_formula(std::string_view text, std::span<const std::string> variables);

/// Fully parenthesised infix form. Constants use the shortest representation
/// that reads back to the same double, so parse_formula(render_infix(t))
/// reproduces t node for node.
std::string render_infix(const Node& tree, std::span<const std::string> variables);

/// Shortest round-trip decimal form of a finite double.
std::string format_number(double value);

}  // namespace gepcc::expr
