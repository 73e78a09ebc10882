#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "smcheck/bltl.hpp"

namespace smcheck::bltl {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      message_(message), line_(line), column_(column)
{
}

namespace {

enum class Tok {
    Ident, Number, Char, Hash, LParen, RParen,
    Not, And, Or, Implies,
    Eq, Ne, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash,
    End
};

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0; // Number, Char
    std::size_t line = 1;
    std::size_t column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':';
}

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto peek = [&](std::size_t off) { return i + off < src.size() ? src[i + off] : '\0'; };

    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t{Tok::End, {}, 0.0, line, col};
        const std::size_t start = i;
        if (ident_start(c)) {
            std::size_t n = 1;
            while (ident_char(peek(n)))
                ++n;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(start, n));
            advance(n);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t n = 0;
            while (std::isdigit(static_cast<unsigned char>(peek(n))))
                ++n;
            if (peek(n) == '.' && std::isdigit(static_cast<unsigned char>(peek(n + 1)))) {
                ++n;
                while (std::isdigit(static_cast<unsigned char>(peek(n))))
                    ++n;
            }
            if (peek(n) == 'e' || peek(n) == 'E') {
                std::size_t m = n + 1;
                if (peek(m) == '+' || peek(m) == '-')
                    ++m;
                if (std::isdigit(static_cast<unsigned char>(peek(m)))) {
                    while (std::isdigit(static_cast<unsigned char>(peek(m))))
                        ++m;
                    n = m;
                }
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(start, n));
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            advance(n);
        } else if (c == '\'') {
            std::size_t n = 1;
            char value = peek(1);
            if (value == '\\') {
                switch (peek(2)) {
                case 'n': value = '\n'; break;
                case 't': value = '\t'; break;
                case '0': value = '\0'; break;
                default: value = peek(2); break;
                }
                n = 3;
            } else {
                n = 2;
            }
            if (i + n >= src.size() || peek(n) != '\'' || (n == 2 && value == '\''))
                throw ParseError("unterminated character literal", line, col);
            t.kind = Tok::Char;
            t.number = static_cast<unsigned char>(value);
            t.text = std::string(src.substr(start, n + 1));
            advance(n + 1);
        } else {
            auto two = [&](char second) { return peek(1) == second; };
            std::size_t n = 1;
            switch (c) {
            case '#': t.kind = Tok::Hash; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '*': t.kind = Tok::Star; break;
            case '/': t.kind = Tok::Slash; break;
            case '&':
                t.kind = Tok::And;
                n = two('&') ? 2 : 1;
                break;
            case '|':
                t.kind = Tok::Or;
                n = two('|') ? 2 : 1;
                break;
            case '!':
                t.kind = two('=') ? Tok::Ne : Tok::Not;
                n = two('=') ? 2 : 1;
                break;
            case '=':
                if (two('>')) {
                    t.kind = Tok::Implies;
                    n = 2;
                } else {
                    t.kind = Tok::Eq;
                    n = two('=') ? 2 : 1;
                }
                break;
            case '<':
                t.kind = two('=') ? Tok::Le : Tok::Lt;
                n = two('=') ? 2 : 1;
                break;
            case '>':
                t.kind = two('=') ? Tok::Ge : Tok::Gt;
                n = two('=') ? 2 : 1;
                break;
            default:
                throw ParseError("unknown operator '" + std::string(1, c) + "'", line, col);
            }
            t.text = std::string(src.substr(start, n));
            advance(n);
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "end of input", 0.0, line, col});
    return out;
}

std::optional<Expr::Op> comparison(Tok t)
{
    switch (t) {
    case Tok::Eq: return Expr::Op::Eq;
    case Tok::Ne: return Expr::Op::Ne;
    case Tok::Lt: return Expr::Op::Lt;
    case Tok::Le: return Expr::Op::Le;
    case Tok::Gt: return Expr::Op::Gt;
    case Tok::Ge: return Expr::Op::Ge;
    default: return std::nullopt;
    }
}

bool later(const ParseError& a, const ParseError& b)
{
    return a.line() > b.line() || (a.line() == b.line() && a.column() > b.column());
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    FormulaPtr whole_formula()
    {
        auto f = formula();
        expect_end();
        return f;
    }

    Query query()
    {
        Query q;
        if (at_ident("Pr") && (peek(1).kind == Tok::LParen || peek(1).kind == Tok::Ge)) {
            ++pos_;
            if (accept(Tok::Ge)) {
                const Token& t = cur();
                if (t.kind == Tok::Minus)
                    fail("probability threshold must lie in (0, 1)");
                expect(Tok::Number, "a probability threshold");
                q.theta = t.number;
                if (!(q.theta > 0.0 && q.theta < 1.0))
                    fail_at(t, "probability threshold must lie in (0, 1)");
                q.kind = Query::Kind::Test;
            }
            expect(Tok::LParen, "'('");
            q.formula = formula();
            expect(Tok::RParen, "')'");
        } else if (at_ident("X") && peek(1).kind == Tok::Le) {
            pos_ += 2;
            const Token& bt = cur();
            Bound b = bound();
            if (b.kind != Bound::Kind::Time)
                fail_at(bt, "mean query needs a time bound, not a step count");
            q.kind = Query::Kind::Mean;
            q.time = b.value;
            const bool paren = accept(Tok::LParen);
            const Token& id = cur();
            expect(Tok::Ident, "a variable name");
            q.variable = id.text;
            if (paren)
                expect(Tok::RParen, "')'");
        } else {
            q.formula = formula();
        }
        expect_end();
        return q;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t off) const { return toks_[std::min(pos_ + off, toks_.size() - 1)]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_ident(std::string_view s) const { return at(Tok::Ident) && cur().text == s; }

    bool accept(Tok k)
    {
        if (!at(k))
            return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.column); }
    [[noreturn]] void fail(const std::string& msg) const { fail_at(cur(), msg); }

    void expect(Tok k, const std::string& what)
    {
        if (!accept(k))
            fail("expected " + what + ", found '" + cur().text + "'");
    }

    void expect_end()
    {
        if (!at(Tok::End))
            fail("unexpected '" + cur().text + "'");
    }

    // "G<=", "F<=", "U<=" prefixes
    bool at_temporal(std::string_view name) const
    {
        return at_ident(name) && peek(1).kind == Tok::Le;
    }

    FormulaPtr formula() { return implication(); }

    FormulaPtr implication()
    {
        auto lhs = disjunction();
        if (accept(Tok::Implies))
            return f_implies(lhs, implication());
        return lhs;
    }

    FormulaPtr disjunction()
    {
        auto lhs = conjunction();
        while (accept(Tok::Or))
            lhs = f_or(lhs, conjunction());
        return lhs;
    }

    FormulaPtr conjunction()
    {
        auto lhs = until_chain();
        while (accept(Tok::And))
            lhs = f_and(lhs, until_chain());
        return lhs;
    }

    FormulaPtr until_chain()
    {
        auto lhs = unary();
        while (at_temporal("U")) {
            pos_ += 2;
            Bound b = bound();
            lhs = until(lhs, unary(), b);
        }
        return lhs;
    }

    FormulaPtr unary()
    {
        if (accept(Tok::Not))
            return f_not(unary());
        if (at_temporal("G") || at_temporal("F")) {
            const bool g = cur().text == "G";
            pos_ += 2;
            Bound b = bound();
            auto body = unary();
            return g ? globally(b, body) : eventually(b, body);
        }
        return primary();
    }

    Bound bound()
    {
        const bool steps = accept(Tok::Hash);
        if (at(Tok::Minus))
            fail("negative bound");
        const Token& t = cur();
        if (!at(Tok::Number))
            fail("expected a bound, found '" + t.text + "'");
        ++pos_;
        if (steps) {
            std::uint64_t k = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), k);
            if (ec != std::errc() || p != t.text.data() + t.text.size())
                fail_at(t, "step bound must be a natural number");
            return Bound::steps(k);
        }
        if (!std::isfinite(t.number) || t.number >= 0x1.0p63)
            fail_at(t, "time bound out of range");
        return Bound::time(static_cast<std::uint64_t>(std::floor(t.number)));
    }

    FormulaPtr primary()
    {
        if (at_ident("true")) {
            ++pos_;
            return f_true();
        }
        if (at_ident("false")) {
            ++pos_;
            return f_false();
        }
        const std::size_t start = pos_;
        try {
            return atom_formula();
        } catch (const ParseError& as_atom) {
            pos_ = start;
            if (!at(Tok::LParen))
                throw;
            try {
                ++pos_;
                auto f = formula();
                expect(Tok::RParen, "')'");
                return f;
            } catch (const ParseError& as_group) {
                if (later(as_atom, as_group))
                    throw as_atom;
                throw;
            }
        }
    }

    FormulaPtr atom_formula()
    {
        auto lhs = expr();
        if (auto op = comparison(cur().kind)) {
            ++pos_;
            auto rhs = expr();
            return atom(binary(*op, lhs, rhs));
        }
        if (lhs->op == Expr::Op::Var)
            return atom(binary(Expr::Op::Ne, lhs, constant(0.0)));
        fail("expected a comparison operator, found '" + cur().text + "'");
    }

    ExprPtr expr()
    {
        auto lhs = term();
        for (;;) {
            if (accept(Tok::Plus))
                lhs = binary(Expr::Op::Add, lhs, term());
            else if (accept(Tok::Minus))
                lhs = binary(Expr::Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    ExprPtr term()
    {
        auto lhs = factor();
        for (;;) {
            if (accept(Tok::Star))
                lhs = binary(Expr::Op::Mul, lhs, factor());
            else if (accept(Tok::Slash))
                lhs = binary(Expr::Op::Div, lhs, factor());
            else
                return lhs;
        }
    }

    ExprPtr factor()
    {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Ident:
            if (t.text == "true" || t.text == "false")
                fail("'" + t.text + "' is not a numeric value");
            ++pos_;
            return variable(t.text);
        case Tok::Number:
        case Tok::Char:
            ++pos_;
            return constant(t.number);
        case Tok::Minus:
            ++pos_;
            if (at(Tok::Number)) {
                const double v = cur().number;
                ++pos_;
                return constant(-v);
            }
            return binary(Expr::Op::Sub, constant(0.0), factor());
        case Tok::LParen: {
            ++pos_;
            auto e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        default: fail("expected an expression, found '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

FormulaPtr parse_formula(std::string_view text)
{
    return Parser(text).whole_formula();
}

Query parse_query(std::string_view text)
{
    Query q = Parser(text).query();
    q.text = std::string(trim(text));
    return q;
}

} // namespace smcheck::bltl
