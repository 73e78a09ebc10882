#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smcheck/trace.hpp"

namespace smcheck::bltl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    /// Message without the location prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Unbound variable, division by zero, or misuse of the evaluator.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Arithmetic expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };

    Op op = Op::Const;
    double value = 0.0; // Const
    std::string name;   // Var
    ExprPtr lhs, rhs;   // binary nodes
};

ExprPtr constant(double v);
ExprPtr variable(std::string name);
ExprPtr binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs);

[[nodiscard]] bool is_comparison(Expr::Op op) noexcept;
[[nodiscard]] std::string to_string(const Expr& e);
bool operator==(const Expr& a, const Expr& b);

/// Evaluates against `values` indexed like `registry`. Comparisons yield 1 or 0.
double eval_expr(const Expr& e, const VarRegistry& registry, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Formulas

struct Bound {
    enum class Kind { Steps, Time };
    Kind kind = Kind::Steps;
    std::uint64_t value = 0; // states for Steps, ticks for Time

    static Bound steps(std::uint64_t k) { return {Kind::Steps, k}; }
    static Bound time(std::uint64_t ticks) { return {Kind::Time, ticks}; }
    bool operator==(const Bound&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Unary nodes (Not, Eventually, Globally) keep their operand in `lhs`.
struct Formula {
    enum class Op { True, False, Atom, Not, And, Or, Implies, Until, Eventually, Globally };

    Op op = Op::True;
    ExprPtr atom; // Atom: a comparison
    FormulaPtr lhs, rhs;
    Bound bound;  // Until, Eventually, Globally
};

FormulaPtr f_true();
FormulaPtr f_false();
/// Throws std::invalid_argument unless `cmp` is a comparison.
FormulaPtr atom(ExprPtr cmp);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr until(FormulaPtr a, FormulaPtr b, Bound bound);
FormulaPtr eventually(Bound bound, FormulaPtr f);
FormulaPtr globally(Bound bound, FormulaPtr f);

/// Fully parenthesized text that parses back to an equal formula.
[[nodiscard]] std::string to_string(const Formula& f);
bool operator==(const Formula& a, const Formula& b);

/// Variable names referenced by atoms, in order of first appearance.
[[nodiscard]] std::vector<std::string> variables(const Formula& f);

/// Nested bound sums. Until(a, b, k) contributes k + max(horizon(a), horizon(b))
/// on the component matching the kind of k.
struct Horizon {
    std::uint64_t steps = 0;
    std::uint64_t ticks = 0;
    bool has_steps = false;
    bool has_time = false;
    bool operator==(const Horizon&) const = default;
};

[[nodiscard]] Horizon horizon(const Formula& f);

// ---------------------------------------------------------------------------
// Queries

struct Query {
    enum class Kind { Estimate, Test, Mean };

    Kind kind = Kind::Estimate;
    FormulaPtr formula;      // Estimate, Test
    double theta = 0.0;      // Test
    std::string variable;    // Mean
    Tick time = 0;           // Mean
    std::string text;        // source text, trimmed
};

[[nodiscard]] std::string_view to_string(Query::Kind kind);

// ---------------------------------------------------------------------------
// Parsing

/// Formula grammar, loosest binding first:
///
///     impl  = or [ "=>" impl ]
///     or    = and { "|" and }
///     and   = until { "&" until }
///     until = unary { "U" "<=" bound unary }
///     unary = "!" unary | ("G" | "F") "<=" bound unary | primary
///     primary = "true" | "false" | expr CMP expr | IDENT | "(" formula ")"
///     bound = "#" NAT | REAL
///
/// `G`, `F` and `U` immediately followed by `<=` are always operators. A bare
/// identifier is shorthand for `IDENT != 0`. Character literals such as '&'
/// denote their code points. A real time bound is floored to whole ticks.
FormulaPtr parse_formula(std::string_view text);

/// `Pr(f)`, `Pr>=theta(f)`, `X<=T(name)`, or a bare formula (read as `Pr(f)`).
Query parse_query(std::string_view text);

} // namespace smcheck::bltl
