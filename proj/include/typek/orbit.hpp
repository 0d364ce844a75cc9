#pragma once

// Forward and backward orbits, Newton inversion of T, planar region tags,
// eventual monotonicity and randomized retrotone falsification.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "typek/kernels.hpp"
#include "typek/map_model.hpp"

namespace typek {

/// Direction of one step x(m) -> x(m+1).
enum class StepTag { none, c_up, c_down, k_up, k_down };

enum class Verdict { converged, cycle_suspected, budget_exhausted, escaped_box };

struct OrbitTrace {
    std::vector<Vec> points;
    std::vector<StepTag> tags;  // tags[m] describes points[m] -> points[m+1]
    Verdict verdict = Verdict::budget_exhausted;
    std::optional<Vec> limit;
    std::size_t steps_used = 0;
    bool backward = false;
};

struct OrbitOptions {
    std::size_t max_steps = 100000;
    double conv_tol = 1e-12;
    std::size_t settle_steps = 10;
    double tag_tol = 1e-12;
};

/// Tag of a step: C-order '<' (tol margins) first, then K-order '<<_K'.
StepTag step_tag(const Vec& from, const Vec& to, const ConeSplit& split, double tol = 1e-12);

/// Iterate T until ||x(n+1) - x(n)|| < conv_tol for settle_steps consecutive
/// steps; the limit is then polished by Newton on T(x) - x.
OrbitTrace iterate_forward(const KolmogorovMap& map, const Vec& x0, const OrbitOptions& opts = {});

/// Newton polish of an approximate fixed point. Returns x unchanged when
/// Newton does not improve the residual.
Vec polish_fixed_point(const KolmogorovMap& map, const Vec& x, int max_iter = 50);

/// x with ||T(x) - y|| <= tol by damped Newton; multi-start on a 9^n grid of
/// [0, r] when x_guess fails. Throws NotInImage.
Vec invert_T(const KolmogorovMap& map, const Vec& y, const Vec& x_guess, double tol = 1e-12);

/// Repeated inversion with warm starts. Converged with limit 0 when the
/// orbit enters the tol-ball at 0; escaped_box when a preimage leaves [0, r].
OrbitTrace iterate_backward(const KolmogorovMap& map, const Vec& x0, std::size_t max_steps = 100000,
                            double tol = 1e-12);

enum class RegionTag { R1, R2, R3, R4, other };

/// Signs of f(x) - 1: R1 f >> 1, R2 f << 1, R3 f <<_K 1, R4 f >>_K 1.
RegionTag classify_region(const KolmogorovMap& map, const Vec& x, double tol = 1e-12);

struct Monotonicity {
    StepTag cone = StepTag::none;
    std::size_t onset = 0;
};

/// First index after which every step carries the same strict tag. Trailing
/// ties (steps below the tag tolerance after convergence) are ignored; the
/// remaining run must have at least `window` steps.
std::optional<Monotonicity> detect_eventual_monotonicity(const OrbitTrace& trace, std::size_t window = 10);

struct RetrotoneCounterexample {
    Vec x = Vec::zeros(1);
    Vec y = Vec::zeros(1);
    Vec tx = Vec::zeros(1);
    Vec ty = Vec::zeros(1);
    std::string clause;
};

enum class RetrotoneStatus { pass, fail, inconclusive };

struct RetrotoneResult {
    RetrotoneStatus status = RetrotoneStatus::inconclusive;
    std::size_t pairs = 0;
    std::size_t filtered = 0;
    double acceptance = 0.0;
    std::optional<RetrotoneCounterexample> counterexample;
};

/// Draw uniform pairs in [0, r], keep those with T(x) <_K T(y), and check the
/// clauses of the weak (Def. of weakly type-K retrotone) or strong definition
/// with exact comparisons. Pairs are drawn in fixed chunks with per-chunk
/// generators, so the result does not depend on the backend or thread count.
RetrotoneResult sample_retrotone(const KolmogorovMap& map, std::size_t n_pairs, std::uint64_t seed, bool weak,
                                 Backend backend = Backend::openmp);

/// Clause check for one pair; empty when every clause holds.
std::optional<std::string> retrotone_violation(const Vec& x, const Vec& y, const Vec& tx, const Vec& ty,
                                               const ConeSplit& split, bool weak);

/// Independent forward orbits.
std::vector<OrbitTrace> iterate_batch(const KolmogorovMap& map, const std::vector<Vec>& starts,
                                      const OrbitOptions& opts = {}, Backend backend = Backend::openmp);

const char* to_string(StepTag t);
const char* to_string(Verdict v);
const char* to_string(RegionTag t);
const char* to_string(RetrotoneStatus s);

}  // namespace typek
