#include <doctest.h>

#include <omp.h>

#include <atomic>
#include <stdexcept>

#include "typek/hypothesis.hpp"
#include "typek/kernels.hpp"
#include "typek/orbit.hpp"

using namespace typek;

namespace {

// The sandbox may have a single core; force a real team so that the OpenMP
// paths interleave.
struct Threads {
    Threads() { omp_set_num_threads(4); }
} const threads;

void check_same(const ScanResult& a, const ScanResult& b) {
    CHECK(a.points == b.points);
    CHECK(a.failures == b.failures);
    CHECK(a.first_failure == b.first_failure);
    CHECK(a.worst == b.worst);
    CHECK(a.worst_verdict.margin == b.worst_verdict.margin);
    CHECK(a.worst_verdict.value == b.worst_verdict.value);
    CHECK(a.first_failure_verdict.detail == b.first_failure_verdict.detail);
}

}  // namespace

TEST_CASE("grid points cover the box with exact endpoints") {
    const Grid g(Box({0, 1}, {2, 3}), std::vector<std::size_t>{3, 5});
    CHECK(g.size() == 15);
    CHECK(g.point(0) == Vec{0, 1});
    CHECK(g.point(1) == Vec{1, 1});
    CHECK(g.point(2) == Vec{2, 1});
    CHECK(g.point(3) == Vec{0, 1.5});
    CHECK(g.point(14) == Vec{2, 3});
    const Grid g1(Box::from_origin({0.3, 0.7}), 17);
    CHECK(g1.point(16) == Vec{0.3, 0});
    CHECK(g1.point(g1.size() - 1) == Vec{0.3, 0.7});
}

TEST_CASE("scan: serial and OpenMP agree on failures and worst point") {
    const Grid g(Box::from_origin({1, 1}), 101);
    const PointKernel k = [](std::span<const double> x) {
        PointVerdict v;
        v.value = x[0] * x[1];
        v.margin = 0.8 - v.value + 0.01 * x[0];
        v.ok = v.margin > 0;
        v.detail = "x0=" + std::to_string(x[0]);
        return v;
    };
    const auto s = scan_grid(g, k, Backend::serial), p = scan_grid(g, k, Backend::openmp);
    check_same(s, p);
    CHECK(s.failures > 0);
    REQUIRE(s.first_failure);
    // The lowest failing index is the first failure in grid order.
    for (std::size_t i = 0; i < *s.first_failure; ++i) CHECK(k(g.point(i).values()).ok);
}

TEST_CASE("scan: ties resolve to the lowest index") {
    const Grid g(Box::from_origin({1, 1}), 33);
    const PointKernel k = [](std::span<const double>) {
        PointVerdict v;
        v.margin = 1.0;
        return v;
    };
    CHECK(scan_grid(g, k, Backend::openmp).worst == 0);
    CHECK(scan_grid(g, k, Backend::serial).worst == 0);
}

TEST_CASE("parallel_for rethrows the exception at the lowest index") {
    for (Backend b : {Backend::serial, Backend::openmp}) {
        std::atomic<int> ran{0};
        try {
            parallel_for(
                1000,
                [&](std::size_t i) {
                    ++ran;
                    if (i % 97 == 13) throw std::runtime_error("at " + std::to_string(i));
                },
                b);
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "at 13");
        }
        CHECK(ran == 1000);
    }
}

TEST_CASE("hypothesis gate: backends agree") {
    const auto map = builtin_example1(0.75, 0.2);
    GateOptions s, p;
    s.backend = Backend::serial;
    p.backend = Backend::openmp;
    const auto a = run_hypothesis_gate(map, s), b = run_hypothesis_gate(map, p);
    CHECK(a.rho.max_rho == b.rho.max_rho);
    CHECK(a.rho.argmax == b.rho.argmax);
    CHECK(a.rho.witness == b.rho.witness);
    CHECK(a.a1.witness == b.a1.witness);
    CHECK(a.invariance.max_ratio == b.invariance.max_ratio);
    CHECK(a.invariance.witness == b.invariance.witness);
    CHECK(a.criterion12->compared == b.criterion12->compared);
    CHECK(a.criterion12->side_violations == b.criterion12->side_violations);
}

TEST_CASE("retrotone sampling: backends agree pair for pair") {
    const auto map = builtin_example1(1.0, 0.05);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const auto a = sample_retrotone(map, 30000, seed, true, Backend::serial);
        const auto b = sample_retrotone(map, 30000, seed, true, Backend::openmp);
        CHECK(a.status == b.status);
        CHECK(a.filtered == b.filtered);
        CHECK(a.pairs == b.pairs);
    }
    const auto broken = parse_map("dim = 2; split_k = 1; r = (2, 2); f1 = exp(0.5*x1 - 1.5*x2); f2 = 1.2*exp(-0.3*x2)");
    const auto a = sample_retrotone(broken, 50000, 5, true, Backend::serial);
    const auto b = sample_retrotone(broken, 50000, 5, true, Backend::openmp);
    REQUIRE(a.counterexample);
    REQUIRE(b.counterexample);
    CHECK(a.counterexample->x == b.counterexample->x);
    CHECK(a.counterexample->y == b.counterexample->y);
}

TEST_CASE("orbit batch: backends agree") {
    const auto map = builtin_example1(0.75, 0.05);
    std::vector<Vec> starts;
    for (int i = 1; i < 40; ++i) starts.push_back(Vec{0.05 * i, 2.0 - 0.05 * i});
    const auto a = iterate_batch(map, starts, {}, Backend::serial);
    const auto b = iterate_batch(map, starts, {}, Backend::openmp);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].points == b[i].points);
        CHECK(a[i].verdict == b[i].verdict);
        CHECK(a[i].limit == b[i].limit);
    }
}
