#include <doctest.h>

#include "smcheck/bltl.hpp"
#include "smcheck/evaluator.hpp"

#include "../support.hpp"

using namespace smcheck;
using namespace smcheck::bltl;

namespace {

FormulaPtr cmp(Expr::Op op, const char* var, double c)
{
    return atom(binary(op, variable(var), constant(c)));
}

bool same(const FormulaPtr& a, const FormulaPtr& b) { return *a == *b; }

} // namespace

TEST_CASE("parse: configuration example with step bounds")
{
    const auto f = parse_formula("G<=#10000((c_read = 38) => (F<=#15(c_read = 64)))");
    const auto expected = globally(Bound::steps(10000),
                                   f_implies(cmp(Expr::Op::Eq, "c_read", 38),
                                             eventually(Bound::steps(15), cmp(Expr::Op::Eq, "c_read", 64))));
    CHECK(same(f, expected));
}

TEST_CASE("parse: keywords and character literals")
{
    CHECK(parse_formula("true")->op == Formula::Op::True);
    CHECK(parse_formula(" false ")->op == Formula::Op::False);
    const auto f = parse_formula("(c_read = '&') => F<=25 (c_read = '@')");
    const auto expected = f_implies(cmp(Expr::Op::Eq, "c_read", 38),
                                    eventually(Bound::time(25), cmp(Expr::Op::Eq, "c_read", 64)));
    CHECK(same(f, expected));
    CHECK(same(parse_formula("x = '\\n'"), cmp(Expr::Op::Eq, "x", 10)));
}

TEST_CASE("parse: precedence and associativity")
{
    const auto a = cmp(Expr::Op::Gt, "a", 0);
    const auto b = cmp(Expr::Op::Gt, "b", 0);
    const auto c = cmp(Expr::Op::Gt, "c", 0);
    CHECK(same(parse_formula("a > 0 | b > 0 & c > 0"), f_or(a, f_and(b, c))));
    CHECK(same(parse_formula("a > 0 => b > 0 => c > 0"), f_implies(a, f_implies(b, c))));
    CHECK(same(parse_formula("a > 0 U<=3 b > 0 U<=#2 c > 0"),
               until(until(a, b, Bound::time(3)), c, Bound::steps(2))));
    CHECK(same(parse_formula("!a > 0 & b > 0"), f_and(f_not(a), b)));
    CHECK(same(parse_formula("F<=2 a > 0 U<=1 b > 0"), until(eventually(Bound::time(2), a), b, Bound::time(1))));
    CHECK(same(parse_formula("a > 0 & (b > 0 | c > 0)"), f_and(a, f_or(b, c))));
}

TEST_CASE("parse: arithmetic")
{
    const auto f = parse_formula("x + 2 * y >= (z - 1) / 4");
    const auto lhs = binary(Expr::Op::Add, variable("x"), binary(Expr::Op::Mul, constant(2), variable("y")));
    const auto rhs = binary(Expr::Op::Div, binary(Expr::Op::Sub, variable("z"), constant(1)), constant(4));
    CHECK(same(f, atom(binary(Expr::Op::Ge, lhs, rhs))));
    CHECK(same(parse_formula("x > -1"), cmp(Expr::Op::Gt, "x", -1)));
    CHECK(same(parse_formula("n_1 <= fifo.num_elements"),
               atom(binary(Expr::Op::Le, variable("n_1"), variable("fifo.num_elements")))));
}

TEST_CASE("parse: bare identifiers are non-zero tests")
{
    CHECK(same(parse_formula("send:call"), cmp(Expr::Op::Ne, "send:call", 0)));
    CHECK(same(parse_formula("G<=10 (div:entry => div:2 != 0)"),
               globally(Bound::time(10), f_implies(cmp(Expr::Op::Ne, "div:entry", 0), cmp(Expr::Op::Ne, "div:2", 0)))));
}

TEST_CASE("parse: errors carry positions")
{
    try {
        (void)parse_formula("x = 1 &\n  y ~ 2");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 5);
        CHECK(e.message().find("unknown operator") != std::string::npos);
    }
    CHECK_THROWS_WITH_AS((void)parse_formula("F<=-3 x = 1"), doctest::Contains("negative bound"), ParseError);
    CHECK_THROWS_WITH_AS((void)parse_formula("F<=#2.5 x = 1"), doctest::Contains("natural number"), ParseError);
    CHECK_THROWS_AS((void)parse_formula("(x = 1"), ParseError);
    CHECK_THROWS_AS((void)parse_formula("x = 1 y = 2"), ParseError);
    CHECK_THROWS_AS((void)parse_formula(""), ParseError);
}

TEST_CASE("printing round-trips through the parser")
{
    RandomSource rng(77);
    for (int i = 0; i < 2000; ++i) {
        const auto f = oracle::random_formula(rng, 4);
        const auto text = to_string(*f);
        CAPTURE(text);
        CHECK(same(parse_formula(text), f));
    }
}

TEST_CASE("queries")
{
    const auto e = parse_query("Pr(F<=5 x = 1)");
    CHECK(e.kind == Query::Kind::Estimate);
    const auto t = parse_query("Pr>=0.9(G<=#3 x = 1)");
    CHECK(t.kind == Query::Kind::Test);
    CHECK(t.theta == 0.9);
    CHECK(t.formula->op == Formula::Op::Globally);
    const auto m = parse_query("X<=2880(reward_up)");
    CHECK(m.kind == Query::Kind::Mean);
    CHECK(m.variable == "reward_up");
    CHECK(m.time == 2880u);
    CHECK(parse_query("  x = 1 ").kind == Query::Kind::Estimate);
    CHECK(parse_query("  Pr(x = 1) ").text == "Pr(x = 1)");
    CHECK_THROWS_AS((void)parse_query("Pr>=1.5(x = 1)"), ParseError);
    CHECK_THROWS_AS((void)parse_query("X<=#5(v)"), ParseError);
}

TEST_CASE("horizon sums nested bounds")
{
    CHECK(horizon(*parse_formula("x = 1")) == Horizon{});
    const auto h1 = horizon(*parse_formula("G<=#10000 F<=#15 a > 0"));
    CHECK(h1.steps == 10015);
    CHECK(h1.ticks == 0);
    CHECK(h1.has_steps);
    CHECK_FALSE(h1.has_time);
    const auto h2 = horizon(*parse_formula("G<=5000 F<=25 a > 0"));
    CHECK(h2.steps == 0);
    CHECK(h2.ticks == 5025);
    CHECK(h2.has_time);
    const auto h3 = horizon(*parse_formula("(F<=3 a > 0) U<=4 (G<=#2 b > 0)"));
    CHECK(h3.ticks == 7);
    CHECK(h3.steps == 2);
}

TEST_CASE("expression evaluation")
{
    VarRegistry r;
    r.add({"c_read", VarKind::Int, ""});
    r.add({"n_elements", VarKind::Int, ""});
    r.add({"x", VarKind::Int, ""});
    r.add({"y", VarKind::Int, ""});
    const std::vector<double> s{38, 5, 3, 0};
    auto eval = [&](const char* text) { return eval_expr(*parse_formula(text)->atom, r, s); };
    CHECK(eval("c_read = 38") == 1.0);
    CHECK(eval("3 <= n_elements") == 1.0);
    CHECK(eval("x * 2 - 1 > 5") == 0.0);
    CHECK_THROWS_AS(eval("x / y > 1"), EvalError);
    CHECK_THROWS_AS(eval("zz > 1"), EvalError);
}
