#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smcheck/bltl.hpp"
#include "smcheck/trace.hpp"

namespace smcheck::bltl {

enum class Verdict : std::uint8_t { False, True, Inconclusive };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

/// Three-valued BLTL evaluation over a finite timed trace.
///
/// On a complete trace an Until with no witness inside the trace is False.
/// On an incomplete trace the evaluator returns a definite verdict only when
/// every extension of the prefix agrees with it.
///
/// Evaluation is incremental: results that no extension can change are cached
/// per (Until node, position), so re-evaluating a growing trace after each
/// append costs time proportional to the undecided window, not the whole
/// trace. The cache assumes successive calls see extensions of the same trace;
/// it resets itself when the trace shrinks or after a call on a complete trace.
class Evaluator {
public:
    /// Throws EvalError if the formula references a name missing from `registry`.
    Evaluator(const Formula& f, const VarRegistry& registry);

    /// Verdict at position k. An empty incomplete trace yields Inconclusive;
    /// k >= |states| otherwise throws EvalError.
    Verdict evaluate(std::span<const TimedState> states, bool complete, std::size_t k = 0);
    Verdict evaluate(const Trace& trace, std::size_t k = 0)
    {
        return evaluate(trace.states(), trace.complete(), k);
    }

    void reset();

private:
    enum class Kind : std::uint8_t { Const, Atom, Not, And, Or, Until };
    enum class Instr : std::uint8_t { Push, Load, Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };

    struct Node {
        Node(Kind k, bool v = false) : kind(k), value(v) {}
        Kind kind;
        bool value = false;          // Const
        std::size_t program = 0;     // Atom: index into programs_
        std::size_t a = 0, b = 0;    // children
        Bound bound;                 // Until
        std::size_t cache = 0;       // Until: index into caches_
    };

    struct Step {
        Instr op;
        double operand = 0.0; // Push: constant, Load: column
    };

    // Per position: result state and the first index whose contribution is
    // not yet settled (all earlier ones were rhs=False, lhs=True).
    struct Entry {
        std::uint32_t next = 0;
        Verdict decided = Verdict::Inconclusive;
    };

    std::size_t compile(const Formula& f);
    std::size_t compile_expr(const Expr& e, std::vector<Step>& out);
    std::size_t add(Node n);

    Verdict eval(std::size_t node, std::size_t i);
    Verdict eval_until(const Node& n, std::size_t i);
    bool eval_atom(const std::vector<Step>& program, const TimedState& s) const;

    const VarRegistry* registry_;
    std::vector<Node> nodes_;
    std::vector<std::vector<Step>> programs_;
    std::vector<std::vector<Entry>> caches_;
    std::size_t root_ = 0;

    std::span<const TimedState> states_;
    bool complete_ = false;
    std::size_t last_size_ = 0;
    bool last_complete_ = false;
    mutable std::vector<double> stack_;
};

/// One-shot evaluation; `complete` overrides the trace's own flag.
Verdict evaluate(const Formula& f, const Trace& trace, std::size_t k, bool complete);

} // namespace smcheck::bltl
