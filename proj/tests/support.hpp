#pragma once

// Test-only helpers: a direct quantifier transcription of bounded LTL over
// finite timed traces, and random formula / trace generators.

#include <cstdint>
#include <span>
#include <vector>

#include "smcheck/bltl.hpp"
#include "smcheck/rng.hpp"
#include "smcheck/trace.hpp"

namespace oracle {

using namespace smcheck;
using namespace smcheck::bltl;

inline bool within(const Bound& b, std::span<const TimedState> s, std::size_t k, std::size_t i)
{
    if (b.kind == Bound::Kind::Steps)
        return i <= b.value;
    return s[k + i].time - s[k].time <= b.value;
}

/// sigma, k |= f on a complete trace, by literal quantifiers:
///   a U<=b c  iff  exists i. within(b, i) and c at k+i and forall j < i. a at k+j
///   F<=b c    iff  exists i. within(b, i) and c at k+i
///   G<=b c    iff  forall i. within(b, i) implies c at k+i
/// Indices range over the trace only.
inline bool holds(const Formula& f, std::span<const TimedState> s, const VarRegistry& reg, std::size_t k)
{
    const std::size_t n = s.size();
    switch (f.op) {
    case Formula::Op::True: return true;
    case Formula::Op::False: return false;
    case Formula::Op::Atom: return eval_expr(*f.atom, reg, s[k].values) != 0.0;
    case Formula::Op::Not: return !holds(*f.lhs, s, reg, k);
    case Formula::Op::And: return holds(*f.lhs, s, reg, k) && holds(*f.rhs, s, reg, k);
    case Formula::Op::Or: return holds(*f.lhs, s, reg, k) || holds(*f.rhs, s, reg, k);
    case Formula::Op::Implies: return !holds(*f.lhs, s, reg, k) || holds(*f.rhs, s, reg, k);
    case Formula::Op::Until:
        for (std::size_t i = 0; k + i < n; ++i) {
            if (!within(f.bound, s, k, i) || !holds(*f.rhs, s, reg, k + i))
                continue;
            bool prefix = true;
            for (std::size_t j = 0; j < i; ++j)
                prefix = prefix && holds(*f.lhs, s, reg, k + j);
            if (prefix)
                return true;
        }
        return false;
    case Formula::Op::Eventually:
        for (std::size_t i = 0; k + i < n; ++i)
            if (within(f.bound, s, k, i) && holds(*f.lhs, s, reg, k + i))
                return true;
        return false;
    case Formula::Op::Globally:
        for (std::size_t i = 0; k + i < n; ++i)
            if (within(f.bound, s, k, i) && !holds(*f.lhs, s, reg, k + i))
                return false;
        return true;
    }
    return false;
}

/// Registry used by the generators: x, y in [0, 3] and a bool b.
inline VarRegistry registry()
{
    VarRegistry r;
    r.add({"x", VarKind::Int, ""});
    r.add({"y", VarKind::Int, ""});
    r.add({"b", VarKind::Bool, ""});
    return r;
}

inline Trace random_trace(RandomSource& rng, std::size_t max_len, bool complete = true)
{
    Trace t(registry());
    const std::size_t n = 1 + rng.uniform_int(max_len);
    Tick time = rng.uniform_int(3);
    for (std::size_t i = 0; i < n; ++i) {
        t.append(TimedState{{double(rng.uniform_int(4)), double(rng.uniform_int(4)), double(rng.uniform_int(2))},
                            time});
        time += rng.uniform_int(4);
    }
    if (complete)
        t.mark_complete();
    return t;
}

inline ExprPtr random_term(RandomSource& rng)
{
    switch (rng.uniform_int(4)) {
    case 0: return variable("x");
    case 1: return variable("y");
    case 2: return constant(double(rng.uniform_int(4)));
    default: return binary(Expr::Op::Add, variable("x"), variable("y"));
    }
}

inline FormulaPtr random_atom(RandomSource& rng)
{
    static constexpr Expr::Op cmps[] = {Expr::Op::Eq, Expr::Op::Ne, Expr::Op::Lt,
                                        Expr::Op::Le, Expr::Op::Gt, Expr::Op::Ge};
    if (rng.uniform_int(4) == 0)
        return atom(binary(Expr::Op::Ne, variable("b"), constant(0)));
    return atom(binary(cmps[rng.uniform_int(6)], random_term(rng), random_term(rng)));
}

inline Bound random_bound(RandomSource& rng)
{
    return rng.bernoulli(0.5) ? Bound::steps(rng.uniform_int(6)) : Bound::time(rng.uniform_int(10));
}

/// Formula of nesting depth at most `depth` (depth 0 is an atom or constant).
inline FormulaPtr random_formula(RandomSource& rng, int depth)
{
    if (depth == 0 || rng.uniform_int(5) == 0) {
        switch (rng.uniform_int(8)) {
        case 0: return f_true();
        case 1: return f_false();
        default: return random_atom(rng);
        }
    }
    switch (rng.uniform_int(8)) {
    case 0: return f_not(random_formula(rng, depth - 1));
    case 1: return f_and(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 2: return f_or(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 3: return f_implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4:
    case 5: return until(random_formula(rng, depth - 1), random_formula(rng, depth - 1), random_bound(rng));
    case 6: return eventually(random_bound(rng), random_formula(rng, depth - 1));
    default: return globally(random_bound(rng), random_formula(rng, depth - 1));
    }
}

} // namespace oracle
