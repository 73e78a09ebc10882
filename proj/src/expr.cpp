#include <charconv>
#include <stdexcept>

#include "smcheck/bltl.hpp"

namespace smcheck::bltl {

ExprPtr constant(double v)
{
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Const;
    e->value = v;
    return e;
}

ExprPtr variable(std::string name)
{
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Var;
    e->name = std::move(name);
    return e;
}

ExprPtr binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs)
{
    if (op == Expr::Op::Const || op == Expr::Op::Var)
        throw std::invalid_argument("binary: not a binary operator");
    if (!lhs || !rhs)
        throw std::invalid_argument("binary: missing operand");
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

bool is_comparison(Expr::Op op) noexcept
{
    switch (op) {
    case Expr::Op::Eq:
    case Expr::Op::Ne:
    case Expr::Op::Lt:
    case Expr::Op::Le:
    case Expr::Op::Gt:
    case Expr::Op::Ge: return true;
    default: return false;
    }
}

namespace {

std::string_view symbol(Expr::Op op)
{
    switch (op) {
    case Expr::Op::Add: return "+";
    case Expr::Op::Sub: return "-";
    case Expr::Op::Mul: return "*";
    case Expr::Op::Div: return "/";
    case Expr::Op::Eq: return "=";
    case Expr::Op::Ne: return "!=";
    case Expr::Op::Lt: return "<";
    case Expr::Op::Le: return "<=";
    case Expr::Op::Gt: return ">";
    case Expr::Op::Ge: return ">=";
    default: return "?";
    }
}

} // namespace

std::string to_string(const Expr& e)
{
    switch (e.op) {
    case Expr::Op::Const: {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
        (void)ec;
        return std::string(buf, end);
    }
    case Expr::Op::Var: return e.name;
    default:
        return "(" + to_string(*e.lhs) + " " + std::string(symbol(e.op)) + " " + to_string(*e.rhs) + ")";
    }
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.op != b.op)
        return false;
    switch (a.op) {
    case Expr::Op::Const: return a.value == b.value;
    case Expr::Op::Var: return a.name == b.name;
    default: return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
    }
}

double eval_expr(const Expr& e, const VarRegistry& registry, const std::vector<double>& values)
{
    switch (e.op) {
    case Expr::Op::Const: return e.value;
    case Expr::Op::Var: {
        auto idx = registry.index_of(e.name);
        if (!idx || *idx >= values.size())
            throw EvalError("unbound variable '" + e.name + "'");
        return values[*idx];
    }
    default: break;
    }
    const double x = eval_expr(*e.lhs, registry, values);
    const double y = eval_expr(*e.rhs, registry, values);
    switch (e.op) {
    case Expr::Op::Add: return x + y;
    case Expr::Op::Sub: return x - y;
    case Expr::Op::Mul: return x * y;
    case Expr::Op::Div:
        if (y == 0.0)
            throw EvalError("division by zero in " + to_string(e));
        return x / y;
    case Expr::Op::Eq: return x == y;
    case Expr::Op::Ne: return x != y;
    case Expr::Op::Lt: return x < y;
    case Expr::Op::Le: return x <= y;
    case Expr::Op::Gt: return x > y;
    case Expr::Op::Ge: return x >= y;
    default: return 0.0;
    }
}

} // namespace smcheck::bltl
