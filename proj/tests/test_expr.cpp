#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "typek/errors.hpp"
#include "typek/expr.hpp"

using namespace typek;
using namespace typek::expr;

namespace {

Symbols sym2(std::map<std::string, double, std::less<>> params = {}) {
    Symbols s;
    s.n_vars = 2;
    s.params = std::move(params);
    return s;
}

double eval(const std::string& text, std::vector<double> x, const Symbols& s) {
    return evaluate(*parse(text, s), x);
}

}  // namespace

TEST_CASE("evaluation of the grammar") {
    const auto s = sym2({{"a", 2.0}, {"b", 0.5}});
    CHECK(eval("1 + 2*3", {0, 0}, s) == 7);
    CHECK(eval("(1 + 2)*3", {0, 0}, s) == 9);
    CHECK(eval("8/4/2", {0, 0}, s) == 1);
    CHECK(eval("10 - 3 - 2", {0, 0}, s) == 5);
    // Unary minus binds tighter than ^ in this grammar.
    CHECK(eval("-x1^2", {3, 0}, s) == 9);
    CHECK(eval("0 - x1^2", {3, 0}, s) == -9);
    CHECK(eval("x1^3 - x2^0", {2, 5}, s) == 7);
    CHECK(eval("x1^-1", {4, 0}, s) == 0.25);
    CHECK(eval("a*x1 + b*x2", {1, 4}, s) == 4);
    CHECK(eval("atan(1)", {0, 0}, s) == doctest::Approx(M_PI / 4).epsilon(1e-15));
    CHECK(eval("exp(0) + log(1) + sqrt(4) + tanh(0)", {0, 0}, s) == 3);
    CHECK(eval("1.5e-1 * 2", {0, 0}, s) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("syntax error at the trailing operator") {
    try {
        parse("1 +", sym2());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 4);
    }
}

TEST_CASE("positions are offset by the enclosing source location") {
    try {
        parse("1 + * 2", sym2(), 7, 10);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(e.column() == 14);
    }
}

TEST_CASE("unknown identifier is named") {
    try {
        parse("1 + c*x1", sym2());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'c'") != std::string::npos);
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(parse("x3", sym2()), ParseError);
    CHECK_THROWS_AS(parse("x0", sym2()), ParseError);
}

TEST_CASE("malformed input") {
    for (const char* bad : {"", "(", "(1", "1)", "atan 1", "foo(1)", "x1^1.5", "x1^", "1 2", "2..3", "*"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse(bad, sym2()), ParseError);
    }
}

TEST_CASE("derivatives of elementary forms") {
    const auto s = sym2({{"a", 3.0}});
    const auto e = parse("a*x1^3 + x2", s);
    const auto d1 = differentiate(e, 0), d2 = differentiate(e, 1);
    const std::vector<double> x{2, 7};
    CHECK(evaluate(*d1, x) == 36);
    CHECK(evaluate(*d2, x) == 1);
    CHECK(d2->op == Op::constant);
    CHECK(differentiate(parse("x1", s), 1)->op == Op::constant);
    CHECK(evaluate(*differentiate(parse("atan(x1)", s), 0), std::vector<double>{1, 0}) == 0.5);
}

TEST_CASE("simplifying constructors fold constants") {
    CHECK(add(constant(1), constant(2))->value == 3);
    CHECK(mul(constant(0), variable(0))->op == Op::constant);
    CHECK(mul(constant(1), variable(0))->op == Op::variable);
    CHECK(add(constant(0), variable(1))->op == Op::variable);
    CHECK(pow(variable(0), 1)->op == Op::variable);
    CHECK(pow(variable(0), 0)->value == 1);
}

TEST_CASE("to_string reparses to the same function") {
    const auto s = sym2({{"a", 1.25}, {"b", 0.05}});
    const std::string src = "1 + b*atan(x2 - 1 - a*(x1-1) - (x1-1)^3) / exp(-x2) - tanh(x1)^2";
    const auto e = parse(src, s);
    const auto back = parse(to_string(*e), s);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        CHECK(evaluate(*back, x) == doctest::Approx(evaluate(*e, x)).epsilon(1e-14));
    }
}

TEST_CASE("property: symbolic derivatives match central differences") {
    const auto s = sym2({{"a", 0.75}, {"b", 0.2}});
    const char* exprs[] = {
        "1 + b*atan(x2 - 1 - a*(x1-1) - (x1-1)^3)",
        "exp(0.5*x1 - 1.5*x2)",
        "log(1 + x1*x2) / (1 + x2^2)",
        "sqrt(1 + x1^2 + x2^4) * tanh(x1 - x2)",
        "(x1 - x2)^5 / (2 + x1)^-2",
        "-(-x1)^3 * a - b/x2",
    };
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (const char* src : exprs) {
        CAPTURE(src);
        const auto e = parse(src, s);
        const auto d = std::array{differentiate(e, 0), differentiate(e, 1)};
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x{u(rng), u(rng)};
            for (std::size_t j = 0; j < 2; ++j) {
                const double h = 1e-6 * (1 + std::abs(x[j]));
                auto xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const double fd = (evaluate(*e, xp) - evaluate(*e, xm)) / (2 * h);
                const double ex = evaluate(*d[j], x);
                CHECK(std::abs(fd - ex) <= 1e-6 * std::max(1.0, std::abs(ex)));
            }
        }
    }
}
