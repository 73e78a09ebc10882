#include <algorithm>
#include <stdexcept>

#include "smcheck/bltl.hpp"

namespace smcheck::bltl {

namespace {

FormulaPtr make(Formula::Op op, FormulaPtr lhs = nullptr, FormulaPtr rhs = nullptr, Bound bound = {})
{
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    f->bound = bound;
    return f;
}

FormulaPtr require(FormulaPtr f)
{
    if (!f)
        throw std::invalid_argument("formula operand is null");
    return f;
}

std::string bound_text(Bound b)
{
    return (b.kind == Bound::Kind::Steps ? "#" : "") + std::to_string(b.value);
}

void collect(const Expr& e, std::vector<std::string>& out)
{
    if (e.op == Expr::Op::Var) {
        if (std::find(out.begin(), out.end(), e.name) == out.end())
            out.push_back(e.name);
        return;
    }
    if (e.lhs)
        collect(*e.lhs, out);
    if (e.rhs)
        collect(*e.rhs, out);
}

void collect(const Formula& f, std::vector<std::string>& out)
{
    if (f.atom)
        collect(*f.atom, out);
    if (f.lhs)
        collect(*f.lhs, out);
    if (f.rhs)
        collect(*f.rhs, out);
}

} // namespace

FormulaPtr f_true() { return make(Formula::Op::True); }
FormulaPtr f_false() { return make(Formula::Op::False); }

FormulaPtr atom(ExprPtr cmp)
{
    if (!cmp || !is_comparison(cmp->op))
        throw std::invalid_argument("atom requires a comparison expression");
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::Atom;
    f->atom = std::move(cmp);
    return f;
}

FormulaPtr f_not(FormulaPtr f) { return make(Formula::Op::Not, require(std::move(f))); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return make(Formula::Op::And, require(std::move(a)), require(std::move(b))); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return make(Formula::Op::Or, require(std::move(a)), require(std::move(b))); }

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b)
{
    return make(Formula::Op::Implies, require(std::move(a)), require(std::move(b)));
}

FormulaPtr until(FormulaPtr a, FormulaPtr b, Bound bound)
{
    return make(Formula::Op::Until, require(std::move(a)), require(std::move(b)), bound);
}

FormulaPtr eventually(Bound bound, FormulaPtr f) { return make(Formula::Op::Eventually, require(std::move(f)), nullptr, bound); }
FormulaPtr globally(Bound bound, FormulaPtr f) { return make(Formula::Op::Globally, require(std::move(f)), nullptr, bound); }

std::string to_string(const Formula& f)
{
    using Op = Formula::Op;
    switch (f.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return to_string(*f.atom);
    case Op::Not: return "(!" + to_string(*f.lhs) + ")";
    case Op::And: return "(" + to_string(*f.lhs) + " & " + to_string(*f.rhs) + ")";
    case Op::Or: return "(" + to_string(*f.lhs) + " | " + to_string(*f.rhs) + ")";
    case Op::Implies: return "(" + to_string(*f.lhs) + " => " + to_string(*f.rhs) + ")";
    case Op::Until:
        return "(" + to_string(*f.lhs) + " U<=" + bound_text(f.bound) + " " + to_string(*f.rhs) + ")";
    case Op::Eventually: return "(F<=" + bound_text(f.bound) + " " + to_string(*f.lhs) + ")";
    case Op::Globally: return "(G<=" + bound_text(f.bound) + " " + to_string(*f.lhs) + ")";
    }
    return "?";
}

bool operator==(const Formula& a, const Formula& b)
{
    if (a.op != b.op)
        return false;
    if (a.op == Formula::Op::Atom)
        return *a.atom == *b.atom;
    if (a.op == Formula::Op::Until || a.op == Formula::Op::Eventually || a.op == Formula::Op::Globally) {
        if (a.bound != b.bound)
            return false;
    }
    if (bool(a.lhs) != bool(b.lhs) || bool(a.rhs) != bool(b.rhs))
        return false;
    return (!a.lhs || *a.lhs == *b.lhs) && (!a.rhs || *a.rhs == *b.rhs);
}

std::vector<std::string> variables(const Formula& f)
{
    std::vector<std::string> out;
    collect(f, out);
    return out;
}

Horizon horizon(const Formula& f)
{
    using Op = Formula::Op;
    Horizon h;
    if (f.lhs) {
        h = horizon(*f.lhs);
    }
    if (f.rhs) {
        Horizon r = horizon(*f.rhs);
        h.steps = std::max(h.steps, r.steps);
        h.ticks = std::max(h.ticks, r.ticks);
        h.has_steps = h.has_steps || r.has_steps;
        h.has_time = h.has_time || r.has_time;
    }
    if (f.op == Op::Until || f.op == Op::Eventually || f.op == Op::Globally) {
        if (f.bound.kind == Bound::Kind::Steps) {
            h.steps += f.bound.value;
            h.has_steps = true;
        } else {
            h.ticks += f.bound.value;
            h.has_time = true;
        }
    }
    return h;
}

std::string_view to_string(Query::Kind kind)
{
    switch (kind) {
    case Query::Kind::Estimate: return "estimate";
    case Query::Kind::Test: return "test";
    case Query::Kind::Mean: return "mean";
    }
    return "?";
}

} // namespace smcheck::bltl
