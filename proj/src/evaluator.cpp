#include "smcheck/evaluator.hpp"

#include <algorithm>

namespace smcheck::bltl {

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

Verdict k_not(Verdict v)
{
    if (v == Verdict::True)
        return Verdict::False;
    if (v == Verdict::False)
        return Verdict::True;
    return v;
}

Verdict k_and(Verdict a, Verdict b)
{
    if (a == Verdict::False || b == Verdict::False)
        return Verdict::False;
    if (a == Verdict::True && b == Verdict::True)
        return Verdict::True;
    return Verdict::Inconclusive;
}

Verdict k_or(Verdict a, Verdict b)
{
    return k_not(k_and(k_not(a), k_not(b)));
}

} // namespace

Evaluator::Evaluator(const Formula& f, const VarRegistry& registry) : registry_(&registry)
{
    root_ = compile(f);
    registry_ = nullptr;
}

std::size_t Evaluator::add(Node n)
{
    nodes_.push_back(n);
    return nodes_.size() - 1;
}

std::size_t Evaluator::compile_expr(const Expr& e, std::vector<Step>& out)
{
    switch (e.op) {
    case Expr::Op::Const: out.push_back({Instr::Push, e.value}); return 1;
    case Expr::Op::Var: {
        auto idx = registry_->index_of(e.name);
        if (!idx)
            throw EvalError("unbound variable '" + e.name + "'");
        out.push_back({Instr::Load, static_cast<double>(*idx)});
        return 1;
    }
    default: break;
    }
    const std::size_t depth_l = compile_expr(*e.lhs, out);
    const std::size_t depth_r = compile_expr(*e.rhs, out);
    Instr op = Instr::Add;
    switch (e.op) {
    case Expr::Op::Add: op = Instr::Add; break;
    case Expr::Op::Sub: op = Instr::Sub; break;
    case Expr::Op::Mul: op = Instr::Mul; break;
    case Expr::Op::Div: op = Instr::Div; break;
    case Expr::Op::Eq: op = Instr::Eq; break;
    case Expr::Op::Ne: op = Instr::Ne; break;
    case Expr::Op::Lt: op = Instr::Lt; break;
    case Expr::Op::Le: op = Instr::Le; break;
    case Expr::Op::Gt: op = Instr::Gt; break;
    case Expr::Op::Ge: op = Instr::Ge; break;
    default: break;
    }
    out.push_back({op, 0.0});
    return std::max(depth_l, depth_r + 1);
}

std::size_t Evaluator::compile(const Formula& f)
{
    using Op = Formula::Op;
    switch (f.op) {
    case Op::True: return add({Kind::Const, true});
    case Op::False: return add({Kind::Const, false});
    case Op::Atom: {
        std::vector<Step> program;
        const std::size_t depth = compile_expr(*f.atom, program);
        stack_.reserve(std::max(stack_.capacity(), depth));
        programs_.push_back(std::move(program));
        Node n{Kind::Atom};
        n.program = programs_.size() - 1;
        return add(n);
    }
    case Op::Not: {
        Node n{Kind::Not};
        n.a = compile(*f.lhs);
        return add(n);
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
        Node n{f.op == Op::And ? Kind::And : Kind::Or};
        n.a = compile(*f.lhs);
        if (f.op == Op::Implies) {
            Node neg{Kind::Not};
            neg.a = n.a;
            n.a = add(neg);
        }
        n.b = compile(*f.rhs);
        return add(n);
    }
    case Op::Until:
    case Op::Eventually:
    case Op::Globally: {
        Node n{Kind::Until};
        n.bound = f.bound;
        if (f.op == Op::Until) {
            n.a = compile(*f.lhs);
            n.b = compile(*f.rhs);
        } else {
            n.a = add({Kind::Const, true});
            n.b = compile(*f.lhs);
            if (f.op == Op::Globally) {
                Node neg{Kind::Not};
                neg.a = n.b;
                n.b = add(neg);
            }
        }
        n.cache = caches_.size();
        caches_.emplace_back();
        const std::size_t u = add(n);
        if (f.op != Op::Globally)
            return u;
        Node outer{Kind::Not};
        outer.a = u;
        return add(outer);
    }
    }
    throw EvalError("unknown formula node");
}

void Evaluator::reset()
{
    for (auto& c : caches_)
        c.clear();
    last_size_ = 0;
    last_complete_ = false;
}

Verdict Evaluator::evaluate(std::span<const TimedState> states, bool complete, std::size_t k)
{
    const std::size_t n = states.size();
    if (n < last_size_ || (last_complete_ && (n != last_size_ || !complete)))
        reset();
    states_ = states;
    complete_ = complete;
    last_size_ = n;
    last_complete_ = complete;
    if (n == 0) {
        if (!complete)
            return Verdict::Inconclusive;
        throw EvalError("cannot evaluate a formula on an empty complete trace");
    }
    if (k >= n)
        throw EvalError("start position " + std::to_string(k) + " is outside the trace (length "
                        + std::to_string(n) + ")");
    for (auto& c : caches_)
        if (c.size() < n)
            c.resize(n);
    return eval(root_, k);
}

bool Evaluator::eval_atom(const std::vector<Step>& program, const TimedState& s) const
{
    auto& st = stack_;
    st.clear();
    for (const Step& step : program) {
        if (step.op == Instr::Push) {
            st.push_back(step.operand);
            continue;
        }
        if (step.op == Instr::Load) {
            st.push_back(s.values[static_cast<std::size_t>(step.operand)]);
            continue;
        }
        const double y = st.back();
        st.pop_back();
        double& x = st.back();
        switch (step.op) {
        case Instr::Add: x = x + y; break;
        case Instr::Sub: x = x - y; break;
        case Instr::Mul: x = x * y; break;
        case Instr::Div:
            if (y == 0.0)
                throw EvalError("division by zero at time " + std::to_string(s.time));
            x = x / y;
            break;
        case Instr::Eq: x = x == y; break;
        case Instr::Ne: x = x != y; break;
        case Instr::Lt: x = x < y; break;
        case Instr::Le: x = x <= y; break;
        case Instr::Gt: x = x > y; break;
        case Instr::Ge: x = x >= y; break;
        default: break;
        }
    }
    return st.back() != 0.0;
}

Verdict Evaluator::eval(std::size_t node, std::size_t i)
{
    const Node& n = nodes_[node];
    switch (n.kind) {
    case Kind::Const: return n.value ? Verdict::True : Verdict::False;
    case Kind::Atom: return eval_atom(programs_[n.program], states_[i]) ? Verdict::True : Verdict::False;
    case Kind::Not: return k_not(eval(n.a, i));
    case Kind::And: {
        const Verdict a = eval(n.a, i);
        if (a == Verdict::False)
            return a;
        return k_and(a, eval(n.b, i));
    }
    case Kind::Or: {
        const Verdict a = eval(n.a, i);
        if (a == Verdict::True)
            return a;
        return k_or(a, eval(n.b, i));
    }
    case Kind::Until: return eval_until(n, i);
    }
    return Verdict::Inconclusive;
}

// Scans positions j = i, i+1, ... inside the bound with Kleene logic:
// acc = OR over j of (AND_{l<j} lhs(l)) AND rhs(j), all = AND_{l<=j} lhs(l).
Verdict Evaluator::eval_until(const Node& n, std::size_t i)
{
    Entry& entry = caches_[n.cache][i];
    if (entry.decided != Verdict::Inconclusive)
        return entry.decided;

    const std::size_t size = states_.size();
    const Tick t0 = states_[i].time;
    const bool steps = n.bound.kind == Bound::Kind::Steps;

    Verdict acc = Verdict::False;
    Verdict all = Verdict::True;
    bool settled = true;
    bool bounded_out = false;
    std::size_t j = std::max<std::size_t>(i, entry.next);
    Verdict result = Verdict::Inconclusive;
    bool done = false;

    for (; j < size; ++j) {
        const bool outside = steps ? (j - i > n.bound.value) : (states_[j].time - t0 > n.bound.value);
        if (outside) {
            bounded_out = true;
            break;
        }
        const Verdict rhs = eval(n.b, j);
        acc = k_or(acc, k_and(all, rhs));
        if (acc == Verdict::True) {
            result = acc;
            done = true;
            break;
        }
        const Verdict lhs = eval(n.a, j);
        all = k_and(all, lhs);
        if (all == Verdict::False) {
            result = acc;
            done = true;
            break;
        }
        if (settled && rhs == Verdict::False && lhs == Verdict::True)
            entry.next = static_cast<std::uint32_t>(j + 1);
        else
            settled = false;
    }
    // A step window is closed once its last position exists; a time window
    // stays open since later states may share the current time stamp.
    if (steps && size > i + n.bound.value)
        bounded_out = true;
    if (!done)
        result = (bounded_out || complete_) ? acc : Verdict::Inconclusive;
    if (result != Verdict::Inconclusive)
        entry.decided = result;
    return result;
}

Verdict evaluate(const Formula& f, const Trace& trace, std::size_t k, bool complete)
{
    Evaluator ev(f, trace.registry());
    return ev.evaluate(trace.states(), complete, k);
}

} // namespace smcheck::bltl
