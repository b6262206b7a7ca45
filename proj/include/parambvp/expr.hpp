#pragma once

#include <memory>
#include <string>

#include "parambvp/errors.hpp"

namespace parambvp::expr {

/// Immutable symbolic expression in the variables t (time) and eps (parameter).
///
/// Grammar: literals, t, eps, unary minus, + - * / ^, sin, cos, exp.
/// Exponents are integer literals only. Nodes are shared; trees are never
/// mutated after construction.
class Node;
using ExprPtr = std::shared_ptr<const Node>;

enum class Kind {
    Literal,
    VarT,
    VarEps,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow, // rhs fixed integer exponent
    Sin,
    Cos,
    Exp,
};

class Node {
public:
    Kind kind;
    double value = 0.0;   // Literal
    long exponent = 0;    // Pow
    ExprPtr a, b;         // operands (b unused for unary)

    Node(Kind k, double v, long e, ExprPtr lhs, ExprPtr rhs)
        : kind(k), value(v), exponent(e), a(std::move(lhs)), b(std::move(rhs)) {}
};

// -- construction ------------------------------------------------------------

ExprPtr literal(double v);
ExprPtr var_t();
ExprPtr var_eps();
ExprPtr neg(ExprPtr x);
ExprPtr add(ExprPtr x, ExprPtr y);
ExprPtr sub(ExprPtr x, ExprPtr y);
ExprPtr mul(ExprPtr x, ExprPtr y);
ExprPtr div(ExprPtr x, ExprPtr y);
ExprPtr pow(ExprPtr base, long exponent);
ExprPtr sin(ExprPtr x);
ExprPtr cos(ExprPtr x);
ExprPtr exp(ExprPtr x);

/// Parse expression text. Literal-literal subtrees are constant-folded; no
/// other rewriting happens, so parse(print(e)) reproduces a parsed tree
/// structurally. Throws ParseError with the byte offset on bad input.
ExprPtr parse(const std::string& text);

/// Render with the minimal parentheses needed to preserve structure.
std::string print(const ExprPtr& e);

/// Evaluate at (t, eps). Throws DomainError on division by zero or 0^negative.
double evaluate(const ExprPtr& e, double t, double eps);

enum class Var { T, Eps };

/// Exact symbolic derivative with respect to `v`. The result may share
/// subtrees with the input. Zero/one branches produced by the rules are
/// pruned so repeated differentiation stays tractable.
ExprPtr differentiate(const ExprPtr& e, Var v);

/// True if the tree mentions the given variable.
bool uses(const ExprPtr& e, Var v);

/// Structural equality (same shape, same literals/exponents).
bool equal(const ExprPtr& x, const ExprPtr& y);

} // namespace parambvp::expr
