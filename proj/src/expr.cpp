#include "parambvp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace parambvp::expr {

namespace {

ExprPtr make(Kind k, double v, long e, ExprPtr a, ExprPtr b) {
    return std::make_shared<const Node>(k, v, e, std::move(a), std::move(b));
}

bool is_literal(const ExprPtr& e, double v) {
    return e->kind == Kind::Literal && e->value == v;
}

} // namespace

ExprPtr literal(double v) { return make(Kind::Literal, v, 0, nullptr, nullptr); }
ExprPtr var_t() { return make(Kind::VarT, 0, 0, nullptr, nullptr); }
ExprPtr var_eps() { return make(Kind::VarEps, 0, 0, nullptr, nullptr); }

ExprPtr neg(ExprPtr x) {
    if (x->kind == Kind::Literal) return literal(-x->value);
    return make(Kind::Neg, 0, 0, std::move(x), nullptr);
}

ExprPtr add(ExprPtr x, ExprPtr y) {
    if (x->kind == Kind::Literal && y->kind == Kind::Literal) return literal(x->value + y->value);
    return make(Kind::Add, 0, 0, std::move(x), std::move(y));
}

ExprPtr sub(ExprPtr x, ExprPtr y) {
    if (x->kind == Kind::Literal && y->kind == Kind::Literal) return literal(x->value - y->value);
    return make(Kind::Sub, 0, 0, std::move(x), std::move(y));
}

ExprPtr mul(ExprPtr x, ExprPtr y) {
    if (x->kind == Kind::Literal && y->kind == Kind::Literal) return literal(x->value * y->value);
    return make(Kind::Mul, 0, 0, std::move(x), std::move(y));
}

ExprPtr div(ExprPtr x, ExprPtr y) {
    if (x->kind == Kind::Literal && y->kind == Kind::Literal && y->value != 0.0)
        return literal(x->value / y->value);
    return make(Kind::Div, 0, 0, std::move(x), std::move(y));
}

ExprPtr pow(ExprPtr base, long exponent) {
    if (base->kind == Kind::Literal) {
        const double b = base->value;
        if (!(b == 0.0 && exponent <= 0)) return literal(std::pow(b, static_cast<double>(exponent)));
    }
    return make(Kind::Pow, 0, exponent, std::move(base), nullptr);
}

ExprPtr sin(ExprPtr x) {
    if (x->kind == Kind::Literal) return literal(std::sin(x->value));
    return make(Kind::Sin, 0, 0, std::move(x), nullptr);
}

ExprPtr cos(ExprPtr x) {
    if (x->kind == Kind::Literal) return literal(std::cos(x->value));
    return make(Kind::Cos, 0, 0, std::move(x), nullptr);
}

ExprPtr exp(ExprPtr x) {
    if (x->kind == Kind::Literal) return literal(std::exp(x->value));
    return make(Kind::Exp, 0, 0, std::move(x), nullptr);
}

// -- parsing -----------------------------------------------------------------

namespace {

// Recursive descent, precedence (loosest to tightest): additive, multiplicative,
// unary minus, power, primary. Power binds tighter than unary minus, so
// "-t^2" is -(t^2).
class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ExprPtr run() {
        ExprPtr e = additive();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr additive() {
        ExprPtr e = multiplicative();
        for (;;) {
            if (eat('+')) e = add(e, multiplicative());
            else if (eat('-')) e = sub(e, multiplicative());
            else return e;
        }
    }

    ExprPtr multiplicative() {
        ExprPtr e = unary();
        for (;;) {
            if (eat('*')) e = mul(e, unary());
            else if (eat('/')) e = div(e, unary());
            else return e;
        }
    }

    ExprPtr unary() {
        if (eat('-')) return neg(unary());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (!eat('^')) return base;
        const std::size_t at = pos_;
        // The exponent is a (possibly negated, possibly parenthesized) factor
        // that must constant-fold to an integer literal.
        ExprPtr e = unary();
        if (e->kind != Kind::Literal) {
            pos_ = at;
            fail("exponent must be an integer literal");
        }
        const double v = e->value;
        if (v != std::floor(v) || std::fabs(v) > 1e9) {
            pos_ = at;
            fail("exponent must be an integer literal");
        }
        return pow(std::move(base), static_cast<long>(v));
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = additive();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double v = 0;
        const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc() || ptr != s_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return literal(v);
    }

    ExprPtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "t") return var_t();
        if (name == "eps") return var_eps();
        if (name == "sin" || name == "cos" || name == "exp") {
            if (!eat('(')) fail("expected '(' after function name");
            ExprPtr arg = additive();
            if (!eat(')')) fail("expected ')'");
            if (name == "sin") return sin(std::move(arg));
            if (name == "cos") return cos(std::move(arg));
            return exp(std::move(arg));
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

ExprPtr parse(const std::string& text) { return Parser(text).run(); }

// -- printing ----------------------------------------------------------------

namespace {

// Precedence levels used to decide parenthesization when printing.
int level(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5; // atoms and function calls never need parens
    }
}

void render(const ExprPtr& e, std::string& out);

void child(const ExprPtr& c, int min_level, std::string& out) {
    const bool parens = level(c->kind) < min_level;
    if (parens) out += '(';
    render(c, out);
    if (parens) out += ')';
}

void render(const ExprPtr& e, std::string& out) {
    switch (e->kind) {
        case Kind::Literal: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e->value);
            if (e->value < 0) {
                out += '(';
                out += buf;
                out += ')';
            } else {
                out += buf;
            }
            return;
        }
        case Kind::VarT: out += 't'; return;
        case Kind::VarEps: out += "eps"; return;
        case Kind::Neg:
            out += '-';
            child(e->a, level(Kind::Neg), out);
            return;
        case Kind::Add:
            child(e->a, 1, out);
            out += '+';
            child(e->b, 2, out); // right operand needs higher level: a-(b+c) etc.
            return;
        case Kind::Sub:
            child(e->a, 1, out);
            out += '-';
            child(e->b, 2, out);
            return;
        case Kind::Mul:
            child(e->a, 2, out);
            out += '*';
            child(e->b, 3, out);
            return;
        case Kind::Div:
            child(e->a, 2, out);
            out += '/';
            child(e->b, 3, out);
            return;
        case Kind::Pow:
            child(e->a, 5, out); // base parenthesized unless an atom
            out += '^';
            if (e->exponent < 0) {
                out += '(';
                out += std::to_string(e->exponent);
                out += ')';
            } else {
                out += std::to_string(e->exponent);
            }
            return;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
            out += (e->kind == Kind::Sin ? "sin(" : e->kind == Kind::Cos ? "cos(" : "exp(");
            render(e->a, out);
            out += ')';
            return;
    }
}

} // namespace

std::string print(const ExprPtr& e) {
    std::string out;
    render(e, out);
    return out;
}

// -- evaluation --------------------------------------------------------------

namespace {

double ipow(double base, long k) {
    if (k == 0) {
        if (base == 0.0) return 1.0; // 0^0 := 1, consistent with constant folding
        return 1.0;
    }
    if (base == 0.0 && k < 0) throw DomainError("zero raised to a negative power");
    const unsigned long n = static_cast<unsigned long>(k < 0 ? -k : k);
    double acc = 1.0, b = base;
    for (unsigned long i = n; i != 0; i >>= 1) {
        if (i & 1) acc *= b;
        b *= b;
    }
    return k < 0 ? 1.0 / acc : acc;
}

} // namespace

double evaluate(const ExprPtr& e, double t, double eps) {
    switch (e->kind) {
        case Kind::Literal: return e->value;
        case Kind::VarT: return t;
        case Kind::VarEps: return eps;
        case Kind::Neg: return -evaluate(e->a, t, eps);
        case Kind::Add: return evaluate(e->a, t, eps) + evaluate(e->b, t, eps);
        case Kind::Sub: return evaluate(e->a, t, eps) - evaluate(e->b, t, eps);
        case Kind::Mul: return evaluate(e->a, t, eps) * evaluate(e->b, t, eps);
        case Kind::Div: {
            const double denom = evaluate(e->b, t, eps);
            if (denom == 0.0) throw DomainError("division by zero in expression");
            return evaluate(e->a, t, eps) / denom;
        }
        case Kind::Pow: return ipow(evaluate(e->a, t, eps), e->exponent);
        case Kind::Sin: return std::sin(evaluate(e->a, t, eps));
        case Kind::Cos: return std::cos(evaluate(e->a, t, eps));
        case Kind::Exp: return std::exp(evaluate(e->a, t, eps));
    }
    throw Error("corrupt expression node");
}

// -- differentiation ---------------------------------------------------------

namespace {

// Pruning constructors for derivative assembly only: dropping x*0 and x+0
// keeps repeated derivatives from blowing up. The pruned branch of a product
// with literal zero cannot introduce new domain points, so semantics on the
// original domain are preserved.
ExprPtr dadd(ExprPtr x, ExprPtr y) {
    if (is_literal(x, 0.0)) return y;
    if (is_literal(y, 0.0)) return x;
    return add(std::move(x), std::move(y));
}

ExprPtr dsub(ExprPtr x, ExprPtr y) {
    if (is_literal(y, 0.0)) return x;
    if (is_literal(x, 0.0)) return neg(std::move(y));
    return sub(std::move(x), std::move(y));
}

ExprPtr dmul(ExprPtr x, ExprPtr y) {
    if (is_literal(x, 0.0) || is_literal(y, 0.0)) return literal(0.0);
    if (is_literal(x, 1.0)) return y;
    if (is_literal(y, 1.0)) return x;
    return mul(std::move(x), std::move(y));
}

} // namespace

ExprPtr differentiate(const ExprPtr& e, Var v) {
    switch (e->kind) {
        case Kind::Literal: return literal(0.0);
        case Kind::VarT: return literal(v == Var::T ? 1.0 : 0.0);
        case Kind::VarEps: return literal(v == Var::Eps ? 1.0 : 0.0);
        case Kind::Neg: return neg(differentiate(e->a, v));
        case Kind::Add: return dadd(differentiate(e->a, v), differentiate(e->b, v));
        case Kind::Sub: return dsub(differentiate(e->a, v), differentiate(e->b, v));
        case Kind::Mul:
            return dadd(dmul(differentiate(e->a, v), e->b), dmul(e->a, differentiate(e->b, v)));
        case Kind::Div:
            // (u/v)' = (u'v - uv') / v^2
            return div(dsub(dmul(differentiate(e->a, v), e->b), dmul(e->a, differentiate(e->b, v))),
                       pow(e->b, 2));
        case Kind::Pow: {
            if (e->exponent == 0) return literal(0.0);
            return dmul(dmul(literal(static_cast<double>(e->exponent)), pow(e->a, e->exponent - 1)),
                        differentiate(e->a, v));
        }
        case Kind::Sin: return dmul(cos(e->a), differentiate(e->a, v));
        case Kind::Cos: return neg(dmul(sin(e->a), differentiate(e->a, v)));
        case Kind::Exp: return dmul(exp(e->a), differentiate(e->a, v));
    }
    throw Error("corrupt expression node");
}

bool uses(const ExprPtr& e, Var v) {
    switch (e->kind) {
        case Kind::Literal: return false;
        case Kind::VarT: return v == Var::T;
        case Kind::VarEps: return v == Var::Eps;
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Pow: return uses(e->a, v);
        default: return uses(e->a, v) || uses(e->b, v);
    }
}

bool equal(const ExprPtr& x, const ExprPtr& y) {
    if (x.get() == y.get()) return true;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case Kind::Literal: return x->value == y->value;
        case Kind::VarT:
        case Kind::VarEps: return true;
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp: return equal(x->a, y->a);
        case Kind::Pow: return x->exponent == y->exponent && equal(x->a, y->a);
        default: return equal(x->a, y->a) && equal(x->b, y->b);
    }
}

} // namespace parambvp::expr
