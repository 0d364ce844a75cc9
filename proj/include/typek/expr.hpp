#pragma once

// Small expression language for per-capita growth functions:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := real | ident | '(' expr ')' | '-' base | func '(' expr ')'
//   func   := atan | exp | log | sqrt | tanh
//
// Identifiers are bound parameters or the state variables x1..xN. The grammar
// has no user functions or conditionals, so symbolic differentiation is total.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace typek::expr {

enum class Op { constant, variable, param, add, sub, mul, div, pow, neg, atan, exp, log, sqrt, tanh };

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::constant;
    double value = 0.0;     // constant / param value
    std::size_t index = 0;  // variable index (zero-based)
    int exponent = 0;       // pow
    std::string name;       // param name
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Symbols {
    std::size_t n_vars = 0;
    std::map<std::string, double, std::less<>> params;
};

/// Parse one expression. `line` and `column` locate text[0] in the enclosing
/// source so that ParseError positions refer to the original file.
ExprPtr parse(std::string_view text, const Symbols& symbols, std::size_t line = 1, std::size_t column = 1);

double evaluate(const Node& e, std::span<const double> x);

/// d e / d x_var, simplified (constant folding, 0/1 identities).
ExprPtr differentiate(const ExprPtr& e, std::size_t var);

std::string to_string(const Node& e);

// Simplifying constructors, also used by differentiate.
ExprPtr constant(double v);
ExprPtr variable(std::size_t i);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr pow(ExprPtr a, int exponent);
ExprPtr call(Op fn, ExprPtr a);

}  // namespace typek::expr
