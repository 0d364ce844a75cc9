#include "typek/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "typek/errors.hpp"

namespace typek::expr {

namespace {

std::shared_ptr<Node> make(Op op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

bool is_const(const ExprPtr& e, double v) { return e->op == Op::constant && e->value == v; }
bool is_const(const ExprPtr& e) { return e->op == Op::constant; }

bool is_function_name(std::string_view s, Op& op) {
    if (s == "atan") op = Op::atan;
    else if (s == "exp") op = Op::exp;
    else if (s == "log") op = Op::log;
    else if (s == "sqrt") op = Op::sqrt;
    else if (s == "tanh") op = Op::tanh;
    else return false;
    return true;
}

const char* function_name(Op op) {
    switch (op) {
        case Op::atan: return "atan";
        case Op::exp: return "exp";
        case Op::log: return "log";
        case Op::sqrt: return "sqrt";
        case Op::tanh: return "tanh";
        default: return "?";
    }
}

double ipow(double b, int n) {
    if (n == 0) return 1.0;
    const int m = n < 0 ? -n : n;
    double r = b;
    for (int i = 1; i < m; ++i) r *= b;
    return n < 0 ? 1.0 / r : r;
}

double apply(Op fn, double v) {
    switch (fn) {
        case Op::atan: return std::atan(v);
        case Op::exp: return std::exp(v);
        case Op::log: return std::log(v);
        case Op::sqrt: return std::sqrt(v);
        case Op::tanh: return std::tanh(v);
        default: return std::nan("");
    }
}

// Recursive-descent parser. Builds unsimplified trees so that evaluation follows
// the source's operation order exactly.
class Parser {
public:
    Parser(std::string_view text, const Symbols& sym, std::size_t line, std::size_t column)
        : s_(text), sym_(sym), line_(line), col0_(column) {}

    ExprPtr run() {
        skip_ws();
        if (at_end()) fail("empty expression");
        auto e = parse_expr();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected character '") + s_[pos_] + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col0_ + pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const {
        throw ParseError(msg, line_, col0_ + pos);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            if (at_end()) fail(std::string("expected '") + c + "' but input ended");
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    ExprPtr parse_expr() {
        auto e = parse_term();
        for (;;) {
            if (accept('+')) e = make(Op::add, e, parse_term());
            else if (accept('-')) e = make(Op::sub, e, parse_term());
            else return e;
        }
    }

    ExprPtr parse_term() {
        auto e = parse_factor();
        for (;;) {
            if (accept('*')) e = make(Op::mul, e, parse_factor());
            else if (accept('/')) e = make(Op::div, e, parse_factor());
            else return e;
        }
    }

    ExprPtr parse_factor() {
        auto b = parse_base();
        if (accept('^')) {
            skip_ws();
            const std::size_t start = pos_;
            bool negative = false;
            if (peek() == '-') {
                negative = true;
                ++pos_;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be an integer literal");
            long v = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (s_[pos_] - '0');
                if (v > 64) fail_at("exponent too large", start);
                ++pos_;
            }
            if (peek() == '.' || peek() == 'e' || peek() == 'E') fail("exponent must be an integer literal");
            auto n = make(Op::pow, b);
            n->exponent = static_cast<int>(negative ? -v : v);
            return n;
        }
        return b;
    }

    ExprPtr parse_base() {
        skip_ws();
        if (at_end()) fail("unexpected end of expression");
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            expect(')');
            return e;
        }
        if (c == '-') {
            ++pos_;
            return make(Op::neg, parse_base());
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_++;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = save;
            } else {
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        const std::string lit(s_.substr(start, pos_ - start));
        if (lit == ".") fail_at("malformed number", start);
        char* end = nullptr;
        const double v = std::strtod(lit.c_str(), &end);
        if (end != lit.c_str() + lit.size() || !std::isfinite(v)) fail_at("malformed number '" + lit + "'", start);
        auto n = make(Op::constant);
        n->value = v;
        return n;
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        const std::string_view id = s_.substr(start, pos_ - start);
        Op fn;
        if (is_function_name(id, fn)) {
            skip_ws();
            if (peek() != '(') fail("expected '(' after function " + std::string(id));
            ++pos_;
            auto arg = parse_expr();
            expect(')');
            return make(fn, arg);
        }
        if (auto it = sym_.params.find(id); it != sym_.params.end()) {
            auto n = make(Op::param);
            n->value = it->second;
            n->name = it->first;
            return n;
        }
        if (id.size() >= 2 && id[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < id.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(id[i]));
            if (digits && id[1] != '0') {
                const std::size_t k = std::stoul(std::string(id.substr(1)));
                if (k >= 1 && k <= sym_.n_vars) return variable(k - 1);
                fail_at("variable " + std::string(id) + " out of range for dimension " + std::to_string(sym_.n_vars),
                        start);
            }
        }
        fail_at("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view s_;
    const Symbols& sym_;
    std::size_t line_;
    std::size_t col0_;
    std::size_t pos_ = 0;
};

}  // namespace

ExprPtr constant(double v) {
    auto n = make(Op::constant);
    n->value = v;
    return n;
}

ExprPtr variable(std::size_t i) {
    auto n = make(Op::variable);
    n->index = i;
    return n;
}

ExprPtr add(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    return make(Op::add, std::move(a), std::move(b));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    return make(Op::sub, std::move(a), std::move(b));
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    return make(Op::mul, std::move(a), std::move(b));
}

ExprPtr div(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    return make(Op::div, std::move(a), std::move(b));
}

ExprPtr neg(ExprPtr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->op == Op::neg) return a->lhs;
    return make(Op::neg, std::move(a));
}

ExprPtr pow(ExprPtr a, int exponent) {
    if (exponent == 0) return constant(1.0);
    if (exponent == 1) return a;
    if (is_const(a)) return constant(ipow(a->value, exponent));
    auto n = make(Op::pow, std::move(a));
    n->exponent = exponent;
    return n;
}

ExprPtr call(Op fn, ExprPtr a) { return make(fn, std::move(a)); }

ExprPtr parse(std::string_view text, const Symbols& symbols, std::size_t line, std::size_t column) {
    return Parser(text, symbols, line, column).run();
}

double evaluate(const Node& e, std::span<const double> x) {
    switch (e.op) {
        case Op::constant:
        case Op::param: return e.value;
        case Op::variable: return x[e.index];
        case Op::add: return evaluate(*e.lhs, x) + evaluate(*e.rhs, x);
        case Op::sub: return evaluate(*e.lhs, x) - evaluate(*e.rhs, x);
        case Op::mul: return evaluate(*e.lhs, x) * evaluate(*e.rhs, x);
        case Op::div: return evaluate(*e.lhs, x) / evaluate(*e.rhs, x);
        case Op::pow: return ipow(evaluate(*e.lhs, x), e.exponent);
        case Op::neg: return -evaluate(*e.lhs, x);
        default: return apply(e.op, evaluate(*e.lhs, x));
    }
}

ExprPtr differentiate(const ExprPtr& e, std::size_t var) {
    switch (e->op) {
        case Op::constant:
        case Op::param: return constant(0.0);
        case Op::variable: return constant(e->index == var ? 1.0 : 0.0);
        case Op::add: return add(differentiate(e->lhs, var), differentiate(e->rhs, var));
        case Op::sub: return sub(differentiate(e->lhs, var), differentiate(e->rhs, var));
        case Op::mul:
            return add(mul(differentiate(e->lhs, var), e->rhs), mul(e->lhs, differentiate(e->rhs, var)));
        case Op::div: {
            // (u/v)' = u'/v - u v' / v^2
            auto du = differentiate(e->lhs, var);
            auto dv = differentiate(e->rhs, var);
            return sub(div(du, e->rhs), div(mul(e->lhs, dv), pow(e->rhs, 2)));
        }
        case Op::pow:
            return mul(mul(constant(e->exponent), pow(e->lhs, e->exponent - 1)), differentiate(e->lhs, var));
        case Op::neg: return neg(differentiate(e->lhs, var));
        case Op::atan: return div(differentiate(e->lhs, var), add(constant(1.0), pow(e->lhs, 2)));
        case Op::exp: return mul(e, differentiate(e->lhs, var));
        case Op::log: return div(differentiate(e->lhs, var), e->lhs);
        case Op::sqrt: return div(differentiate(e->lhs, var), mul(constant(2.0), e));
        case Op::tanh: return mul(sub(constant(1.0), pow(e, 2)), differentiate(e->lhs, var));
    }
    return constant(0.0);
}

std::string to_string(const Node& e) {
    std::ostringstream os;
    os.precision(17);
    switch (e.op) {
        case Op::constant: os << e.value; break;
        case Op::param: os << e.name; break;
        case Op::variable: os << 'x' << (e.index + 1); break;
        case Op::add: os << '(' << to_string(*e.lhs) << " + " << to_string(*e.rhs) << ')'; break;
        case Op::sub: os << '(' << to_string(*e.lhs) << " - " << to_string(*e.rhs) << ')'; break;
        case Op::mul: os << '(' << to_string(*e.lhs) << " * " << to_string(*e.rhs) << ')'; break;
        case Op::div: os << '(' << to_string(*e.lhs) << " / " << to_string(*e.rhs) << ')'; break;
        case Op::pow: os << '(' << to_string(*e.lhs) << ")^" << e.exponent; break;
        case Op::neg: os << "-(" << to_string(*e.lhs) << ')'; break;
        default: os << function_name(e.op) << '(' << to_string(*e.lhs) << ')'; break;
    }
    return os.str();
}

}  // namespace typek::expr
