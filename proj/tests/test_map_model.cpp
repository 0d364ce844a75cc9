#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "typek/errors.hpp"
#include "typek/map_model.hpp"

using namespace typek;

namespace {

const char* kExample1Source = R"(# Example 1 written out by hand
dim = 2
split_k = 1
r = (2, 2)
param a = 1
param b = 0.05
f1 = 1 + b*atan(x2 - 1 - a*(x1-1) - (x1-1)^3)
f2 = 1 + b*atan(x1 - 1 - a*(x2-1) - (x2-1)^3)
)";

Vec random_point(std::mt19937_64& rng, const Vec& r) {
    std::vector<double> c(r.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::uniform_real_distribution<double>(0.0, r[i])(rng);
    return Vec(c);
}

// Central differences of T, the oracle for eval_DT.
Mat fd_jacobian(const KolmogorovMap& map, const Vec& x) {
    const std::size_t n = map.dim();
    Mat j(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double h = 1e-6 * (1 + std::abs(x[c]));
        const Vec tp = eval_T(map, x.with(c, x[c] + h)), tm = eval_T(map, x.with(c, x[c] - h));
        for (std::size_t r = 0; r < n; ++r) j(r, c) = (tp[r] - tm[r]) / (2 * h);
    }
    return j;
}

}  // namespace

TEST_CASE("eval_T on Example 1") {
    const auto map = builtin_example1(1.0, 0.05);
    CHECK(eval_T(map, {1, 1}) == Vec{1, 1});
    CHECK(eval_T(map, {0, 0}) == Vec{0, 0});
    const Vec f0 = map.f({0, 0});
    CHECK(f0[0] == doctest::Approx(1.0392699).epsilon(1e-7));
    CHECK(f0[0] == 1 + 0.05 * std::atan(1.0));
    CHECK(f0[1] == f0[0]);
}

TEST_CASE("eval_M and eval_DT at the symmetric fixed point") {
    const double a = 1.0, b = 0.05;
    const auto map = builtin_example1(a, b);
    const Mat m = eval_M(map, {1, 1});
    CHECK(m(0, 0) == doctest::Approx(a * b).epsilon(1e-15));
    CHECK(m(1, 1) == doctest::Approx(a * b).epsilon(1e-15));
    CHECK(m(0, 1) == doctest::Approx(-b).epsilon(1e-15));
    CHECK(m(1, 0) == doctest::Approx(-b).epsilon(1e-15));
    const Mat dt = eval_DT(map, {1, 1});
    CHECK(dt(0, 0) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(dt(0, 1) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(dt(1, 0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(dt(1, 1) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(eval_M(map, {0, 0}) == Mat(2));
}

TEST_CASE("M sign pattern at random interior points") {
    const auto map = builtin_example1(1.0, 0.05);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const Vec x = random_point(rng, map.r());
        const Mat m = eval_M(map, x);
        CHECK(m(0, 0) >= 0);
        CHECK(m(1, 1) >= 0);
        CHECK(m(0, 1) <= 0);
        CHECK(m(1, 0) <= 0);
    }
}

TEST_CASE("property: DT matches the product rule and central differences") {
    for (double a : {1.0, 1.5, 0.75}) {
        const auto builtin = builtin_example1(a, 0.05);
        const auto parsed = parse_map(kExample1Source, {{"a", a}});
        std::mt19937_64 rng(6);
        for (const KolmogorovMap* map : {&builtin, &parsed}) {
            for (int i = 0; i < 100; ++i) {
                const Vec x = random_point(rng, map->r());
                const Mat dt = eval_DT(*map, x), direct = jacobian_T_direct(*map, x), fd = fd_jacobian(*map, x);
                for (std::size_t r = 0; r < 2; ++r) {
                    for (std::size_t c = 0; c < 2; ++c) {
                        const double scale = std::max(1.0, std::abs(direct(r, c)));
                        CHECK(std::abs(dt(r, c) - direct(r, c)) <= 1e-10 * scale);
                        CHECK(std::abs(fd(r, c) - direct(r, c)) <= 1e-6 * scale);
                    }
                }
            }
        }
    }
}

TEST_CASE("parsed Example 1 agrees with the builtin") {
    const auto builtin = builtin_example1(1.0, 0.05);
    const auto parsed = parse_map(kExample1Source);
    CHECK(parsed.name() == "custom");
    CHECK(parsed.r() == Vec{2, 2});
    CHECK(parsed.split().k() == 1);
    std::mt19937_64 rng(7);
    double max_dev = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec x = random_point(rng, builtin.r());
        max_dev = std::max(max_dev, dist_inf(builtin.f(x), parsed.f(x)));
    }
    CHECK(max_dev == 0.0);
}

TEST_CASE("parameter overrides replace file values") {
    const auto parsed = parse_map(kExample1Source, {{"a", 0.75}, {"b", 0.1}});
    CHECK(parsed.param("a") == 0.75);
    CHECK(parsed.param("b") == 0.1);
    const auto builtin = builtin_example1(0.75, 0.1);
    CHECK(parsed.f({0.3, 1.2}) == builtin.f({0.3, 1.2}));
}

TEST_CASE("statements may be separated by semicolons and carry comments") {
    const auto m = parse_map("dim = 2; split_k = 1; r = (1, 1.5)  # box\nf1 = 2 - x1 + x2/10; f2 = 2 - x2 + x1/10\n");
    CHECK(m.r() == Vec{1, 1.5});
    CHECK(dist_inf(m.f({0.5, 1}), Vec{1.6, 1.05}) < 1e-15);
}

TEST_CASE("parse errors") {
    auto expect_parse_error = [](const std::string& src, std::size_t line) {
        CAPTURE(src);
        try {
            parse_map(src);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\nf1 = 1 +\nf2 = 1\n", 4);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\nf1 = 1 + c\nf2 = 1\n", 4);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = 2, 2\nf1 = 1\nf2 = 1\n", 3);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\nf1 = 1\nf1 = 1\n", 5);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\nf0 = 1\nf2 = 1\n", 4);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\ng1 = 1\n", 4);
    expect_parse_error("dim = two\n", 1);
    expect_parse_error("dim = 2\nsplit_k = 1\nf1 = 1\nf2 = 1\n", 4);
    expect_parse_error("dim = 2\nsplit_k = 1\nr = (2, 2)\nparam a 1\nf1 = 1\nf2 = 1\n", 4);
}

TEST_CASE("dimension and domain errors") {
    CHECK_THROWS_AS(parse_map("dim = 1; split_k = 1; r = (2); f1 = 1"), DimensionError);
    CHECK_THROWS_AS(parse_map("dim = 2; split_k = 2; r = (2, 2); f1 = 1; f2 = 1"), DimensionError);
    CHECK_THROWS_AS(parse_map("dim = 2; split_k = 1; r = (2, 2, 2); f1 = 1; f2 = 1"), DimensionError);
    CHECK_THROWS_AS(parse_map("dim = 2; split_k = 1; r = (2, 2); f1 = 1"), DimensionError);
    CHECK_THROWS_AS(parse_map("dim = 2; split_k = 1; r = (2, 0); f1 = 1; f2 = 1"), DomainError);
    CHECK_THROWS_AS(parse_map("dim = 2; split_k = 1; r = (2, 2); f1 = 1 - x1; f2 = 1"), DomainError);
    CHECK_THROWS_AS(builtin_example1(0.0, 0.05), DomainError);
    CHECK_THROWS_AS(builtin_example1(1.0, -0.05), DomainError);
    CHECK_THROWS_AS(load_map_file("/nonexistent/map.txt"), Error);
}

TEST_CASE("condition on b") {
    CHECK(example1_b_bound(1.0) == doctest::Approx(1.0 / (10.0 + std::atan(3.0))).epsilon(1e-15));
    CHECK(example1_b_bound(1.0) == doctest::Approx(0.08895).epsilon(1e-4));
    CHECK(example1_b_bound(0.75) == doctest::Approx(0.09327).epsilon(1e-4));
    CHECK(builtin_example1(1.0, 0.05).warnings().empty());
    CHECK(builtin_example1(1.5, 0.05).warnings().empty());
    CHECK(builtin_example1(0.75, 0.05).warnings().empty());
    CHECK(builtin_example1(0.75, 0.2).warnings().size() == 1);
    // a/pi is the binding bound for small a.
    CHECK(example1_b_bound(0.1) == doctest::Approx(0.1 / std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("norm bound value") {
    CHECK(example1_norm_bound(1.0, 0.05) == doctest::Approx(0.5 / (1 - 0.05 * std::atan(3.0))).epsilon(1e-15));
    CHECK(example1_norm_bound(1.0, 0.05) == doctest::Approx(0.533306).epsilon(1e-6));
}

TEST_CASE("diagonal map g") {
    const auto m1 = builtin_example1(1.0, 0.05);
    CHECK(diagonal_map_g(m1, 1.0) == 1.0);
    CHECK(diagonal_map_g(m1, 0.0) == 0.0);
    const auto m075 = builtin_example1(0.75, 0.05);
    CHECK(diagonal_map_g(m075, 1.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(diagonal_map_g(m075, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(diagonal_map_g(parse_map(kExample1Source), 1.0), Error);
}

TEST_CASE("property: Example 1 symmetry and diagonal invariance") {
    for (double a : {1.0, 1.5, 0.75}) {
        const auto map = builtin_example1(a, 0.05);
        std::mt19937_64 rng(8);
        for (int i = 0; i < 500; ++i) {
            const Vec x = random_point(rng, map.r());
            const Vec fx = map.f(x), fs = map.f({x[1], x[0]});
            CHECK(fs[0] == fx[1]);
            CHECK(fs[1] == fx[0]);
            const Vec tx = eval_T(map, x), ts = eval_T(map, {x[1], x[0]});
            CHECK(ts == Vec{tx[1], tx[0]});
            const double u = x[0];
            const Vec tu = eval_T(map, {u, u});
            CHECK(tu[0] == tu[1]);
            CHECK(std::abs(tu[0] - diagonal_map_g(map, u)) <= 1e-15 * std::max(1.0, u));
        }
    }
}

TEST_CASE("property: Kolmogorov structure keeps coordinate planes") {
    const auto map = parse_map(kExample1Source, {{"a", 1.5}});
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        const Vec x = random_point(rng, map.r());
        for (std::size_t j = 0; j < 2; ++j) {
            const Vec xz = x.with(j, 0.0);
            const Vec t = eval_T(map, xz);
            CHECK(t[j] == 0.0);
            CHECK(t[1 - j] > 0.0);
        }
    }
}

TEST_CASE("f positive on the box for the builtin") {
    const auto map = builtin_example1(0.75, 0.05);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 1000; ++i) {
        const Vec fx = map.f(random_point(rng, map.r()));
        CHECK(fx[0] > 0);
        CHECK(fx[1] > 0);
    }
}

TEST_CASE("eval_M rejects non-positive f") {
    // f1 = 1 - x1 passes the probe grid on [0, 0.5] but is zero at x1 = 1.
    const auto map = parse_map("dim = 2; split_k = 1; r = (0.5, 1); f1 = 1 - x1; f2 = 2 - x2");
    CHECK_THROWS_AS(eval_M(map, {1.0, 0.5}), DomainError);
    CHECK_NOTHROW(eval_M(map, {0.25, 0.5}));
}
