#include <doctest.h>

#include <cmath>
#include <random>

#include "typek/attractor.hpp"
#include "typek/hypothesis.hpp"
#include "typek/orbit.hpp"

using namespace typek;

namespace {

struct Draw {
    std::mt19937_64 rng;
    explicit Draw(std::uint64_t seed) : rng(seed) {}
    double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

// a away from the bifurcation at 1, b small enough for the gate.
double draw_a(Draw& d) { return d(0.0, 1.0) < 0.5 ? d(0.3, 0.9) : d(1.1, 2.5); }

}  // namespace

TEST_CASE("property: interior fixed points follow 1 +- sqrt(1 - a)") {
    Draw d(101);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = draw_a(d), b = d(0.01, 0.05);
        CAPTURE(a);
        CAPTURE(b);
        const auto interior = find_interior_fixed_points(builtin_example1(a, b));
        if (a > 1.0) {
            REQUIRE(interior.size() == 1);
            CHECK(dist_inf(interior[0].location, {1, 1}) < 1e-10);
            CHECK(interior[0].stability == Stability::attractor);
        } else {
            REQUIRE(interior.size() == 3);
            const double s = std::sqrt(1.0 - a);
            CHECK(std::abs(interior[0].location[0] - (1 - s)) < 1e-10);
            CHECK(std::abs(interior[2].location[0] - (1 + s)) < 1e-10);
            CHECK(interior[1].stability == Stability::saddle);
        }
    }
}

TEST_CASE("property: forward orbits end at catalogued fixed points") {
    Draw d(202);
    for (int trial = 0; trial < 8; ++trial) {
        const double a = draw_a(d), b = d(0.02, 0.05);
        const auto map = builtin_example1(a, b);
        const auto fps = find_all_fixed_points(map);
        for (int i = 0; i < 10; ++i) {
            const Vec x0{d(0.01, 2.0), d(0.01, 2.0)};
            const auto t = iterate_forward(map, x0);
            CAPTURE(a);
            CAPTURE(x0.str());
            REQUIRE(t.verdict == Verdict::converged);
            double best = INFINITY;
            const FixedPointRecord* hit = nullptr;
            for (const auto& f : fps)
                if (dist_inf(f.location, *t.limit) < best) best = dist_inf(f.location, *t.limit), hit = &f;
            CHECK(best < 1e-8);
            // Off the diagonal a generic start never lands on a saddle.
            if (std::abs(x0[0] - x0[1]) > 1e-3) CHECK(hit->stability == Stability::attractor);
        }
    }
}

TEST_CASE("property: the box is invariant and the diagonal is preserved") {
    Draw d(303);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = draw_a(d), b = d(0.01, 0.05);
        const auto map = builtin_example1(a, b);
        for (int i = 0; i < 200; ++i) {
            const Vec x{d(0.0, 2.0), d(0.0, 2.0)};
            const Vec tx = eval_T(map, x);
            CHECK(leq(Vec{0, 0}, tx));
            CHECK(leq(tx, map.r()));
            const double u = x[0];
            const Vec tu = eval_T(map, {u, u});
            CHECK(tu[0] == tu[1]);
        }
    }
}

TEST_CASE("property: invert_T undoes T for random parameters") {
    Draw d(404);
    for (int trial = 0; trial < 20; ++trial) {
        const auto map = builtin_example1(draw_a(d), d(0.01, 0.05));
        for (int i = 0; i < 20; ++i) {
            const Vec x{d(0.0, 2.0), d(0.0, 2.0)};
            CHECK(dist_inf(invert_T(map, eval_T(map, x), x), x) <= 1e-10);
        }
    }
}

TEST_CASE("property: T is K-retrotone for gate-passing parameters") {
    Draw d(505);
    for (int trial = 0; trial < 6; ++trial) {
        const auto map = builtin_example1(draw_a(d), d(0.01, 0.05));
        GateOptions g;
        g.grid_res = 17;
        REQUIRE(run_hypothesis_gate(map, g).all_pass());
        CHECK(sample_retrotone(map, 40000, 1 + trial, true).status == RetrotoneStatus::pass);
    }
}

TEST_CASE("property: fixed points are ordered as the theory requires") {
    // Interior points are pairwise << and hence never <_K-related; Q2 <<_K Q1.
    Draw d(606);
    const ConeSplit s(2, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto map = builtin_example1(d(0.3, 0.9), d(0.01, 0.05));
        const auto fps = find_all_fixed_points(map);
        std::vector<Vec> interior;
        Vec q1 = Vec::zeros(2), q2 = Vec::zeros(2);
        for (const auto& f : fps) {
            if (f.kind == FixedPointKind::interior) interior.push_back(f.location);
            if (f.kind == FixedPointKind::axial1) q1 = f.location;
            if (f.kind == FixedPointKind::axial2) q2 = f.location;
        }
        for (std::size_t i = 0; i + 1 < interior.size(); ++i) {
            CHECK(ll(interior[i], interior[i + 1]));
            CHECK_FALSE(lt_k(interior[i], interior[i + 1], s));
            CHECK_FALSE(lt_k(interior[i + 1], interior[i], s));
        }
        CHECK(ll_k(q2, q1, s));
    }
}
