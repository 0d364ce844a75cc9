#include "typek/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "typek/errors.hpp"

namespace typek {

StepTag step_tag(const Vec& from, const Vec& to, const ConeSplit& split, double tol) {
    const OrderRel rel = compare(from, to, split, tol);
    const auto strict = [](const ConeRelation& r, Strength s) {
        return static_cast<int>(r.strength) >= static_cast<int>(s);
    };
    if (strict(rel.c_order, Strength::lt)) return rel.c_order.x_below ? StepTag::c_up : StepTag::c_down;
    if (strict(rel.k_order, Strength::ll)) return rel.k_order.x_below ? StepTag::k_up : StepTag::k_down;
    return StepTag::none;
}

namespace {

bool escaped(const Vec& y, const Vec& r) {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!(y[i] >= 0.0) || !(y[i] <= 10.0 * r[i])) return true;
    return false;
}

}  // namespace

Vec polish_fixed_point(const KolmogorovMap& map, const Vec& x0, int max_iter) {
    const std::size_t n = map.dim();
    Vec x = x0;
    double res = dist_inf(eval_T(map, x), x);
    for (int it = 0; it < max_iter && res > 0.0; ++it) {
        Mat j = eval_DT(map, x);
        const Vec tx = eval_T(map, x);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            j(i, i) -= 1.0;
            rhs[i] = -(tx[i] - x[i]);
        }
        std::vector<double> d;
        try {
            d = solve(j, rhs);
        } catch (const NumericalError&) {
            break;
        }
        std::vector<double> c(x.begin(), x.end());
        bool valid = true;
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = x[i] == 0.0 ? 0.0 : x[i] + d[i];
            if (!std::isfinite(c[i]) || c[i] < 0.0) valid = false;
        }
        if (!valid) break;
        const Vec cand(std::move(c));
        const double cres = dist_inf(eval_T(map, cand), cand);
        if (!(cres < res)) break;
        x = cand;
        res = cres;
    }
    // A polish that wanders off is not a polish.
    return dist_inf(x, x0) <= 1e-6 * (1.0 + norm_inf(x0)) ? x : x0;
}

OrbitTrace iterate_forward(const KolmogorovMap& map, const Vec& x0, const OrbitOptions& opts) {
    if (x0.size() != map.dim()) throw DimensionError("orbit start has wrong dimension");
    for (double v : x0)
        if (v < 0.0) throw DomainError("orbit start must lie in C");
    if (opts.max_steps < 1) throw DomainError("max_steps must be at least 1");

    OrbitTrace tr;
    tr.points.push_back(x0);
    const Vec& r = map.r();
    std::size_t quiet = 0;
    std::size_t cyclic = 0;
    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        const Vec& x = tr.points.back();
        Vec y = eval_T(map, x);
        tr.steps_used = step + 1;
        tr.tags.push_back(step_tag(x, y, map.split(), opts.tag_tol));
        const double d = dist_inf(x, y);
        tr.points.push_back(std::move(y));
        const Vec& cur = tr.points.back();
        if (escaped(cur, r)) {
            tr.verdict = Verdict::escaped_box;
            return tr;
        }
        if (d < opts.conv_tol) {
            ++quiet;
            cyclic = 0;
            if (quiet >= opts.settle_steps) {
                tr.verdict = Verdict::converged;
                tr.limit = polish_fixed_point(map, cur);
                return tr;
            }
            continue;
        }
        quiet = 0;
        bool repeat = false;
        const std::size_t m = tr.points.size() - 1;
        for (std::size_t p = 2; p <= 8 && p <= m && !repeat; ++p)
            repeat = dist_inf(cur, tr.points[m - p]) < opts.conv_tol;
        cyclic = repeat ? cyclic + 1 : 0;
        if (cyclic >= opts.settle_steps) {
            tr.verdict = Verdict::cycle_suspected;
            return tr;
        }
    }
    tr.verdict = Verdict::budget_exhausted;
    return tr;
}

namespace {

std::optional<Vec> newton_inverse(const KolmogorovMap& map, const Vec& y, const Vec& start, double tol) {
    const std::size_t n = map.dim();
    std::vector<double> xs(start.begin(), start.end());
    for (std::size_t i = 0; i < n; ++i) xs[i] = y[i] == 0.0 ? 0.0 : std::max(xs[i], 0.0);
    Vec x(std::move(xs));

    auto residual = [&](const Vec& p) { return dist_inf(eval_T(map, p), y); };
    double res = residual(x);
    int extra = 0;
    for (int it = 0; it < 100; ++it) {
        if (res <= tol) {
            // A few more steps push the residual to rounding level when possible.
            if (res == 0.0 || ++extra > 3) return x;
        }
        Mat j(n);
        try {
            j = eval_DT(map, x);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        const Vec tx = eval_T(map, x);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] == 0.0) {
                for (std::size_t c = 0; c < n; ++c) j(i, c) = j(c, i) = 0.0;
                j(i, i) = 1.0;
                rhs[i] = 0.0;
            } else {
                rhs[i] = y[i] - tx[i];
            }
        }
        std::vector<double> d;
        try {
            d = solve(j, rhs);
        } catch (const NumericalError&) {
            return res <= tol ? std::optional<Vec>(x) : std::nullopt;
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 40; ++h, lambda *= 0.5) {
            std::vector<double> c(n);
            bool valid = true;
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = x[i] + lambda * d[i];
                if (!std::isfinite(c[i]) || c[i] < 0.0) valid = false;
            }
            if (!valid) continue;
            Vec cand(std::move(c));
            const double cres = residual(cand);
            if (cres < res) {
                x = std::move(cand);
                res = cres;
                accepted = true;
                break;
            }
        }
        if (!accepted) return res <= tol ? std::optional<Vec>(x) : std::nullopt;
    }
    return res <= tol ? std::optional<Vec>(x) : std::nullopt;
}

}  // namespace

Vec invert_T(const KolmogorovMap& map, const Vec& y, const Vec& x_guess, double tol) {
    const std::size_t n = map.dim();
    if (y.size() != n || x_guess.size() != n) throw DimensionError("invert_T: dimension mismatch");
    for (double v : y)
        if (v < 0.0) throw NotInImage("invert_T: y = " + y.str() + " is outside C");
    if (norm_inf(y) == 0.0) return Vec::zeros(n);

    if (auto x = newton_inverse(map, y, x_guess, tol)) return *x;

    const Grid grid(map.domain(), 9);
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) dist[i] = dist_inf(eval_T(map, grid.point(i)), y);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    for (std::size_t idx : order) {
        if (auto x = newton_inverse(map, y, grid.point(idx), tol)) return *x;
    }
    throw NotInImage("no preimage of " + y.str() + " found in [0, r]");
}

OrbitTrace iterate_backward(const KolmogorovMap& map, const Vec& x0, std::size_t max_steps, double tol) {
    OrbitTrace tr;
    tr.backward = true;
    tr.points.push_back(x0);
    std::size_t quiet = 0;
    for (std::size_t step = 0; step < max_steps; ++step) {
        const Vec& x = tr.points.back();
        if (norm_inf(x) < tol) {
            tr.verdict = Verdict::converged;
            tr.limit = Vec::zeros(map.dim());
            return tr;
        }
        Vec p = invert_T(map, x, x, tol);
        tr.steps_used = step + 1;
        tr.tags.push_back(step_tag(x, p, map.split()));
        const double d = dist_inf(x, p);
        tr.points.push_back(std::move(p));
        if (!box_contains(map.domain(), tr.points.back())) {
            tr.verdict = Verdict::escaped_box;
            return tr;
        }
        // Near 0 the inverse contracts slowly; that case ends on the tol-ball test instead.
        quiet = d < tol && norm_inf(tr.points.back()) > 1000.0 * tol ? quiet + 1 : 0;
        if (quiet >= 10) {
            tr.verdict = Verdict::converged;
            tr.limit = tr.points.back();
            return tr;
        }
    }
    if (norm_inf(tr.points.back()) < tol) {
        tr.verdict = Verdict::converged;
        tr.limit = Vec::zeros(map.dim());
    } else {
        tr.verdict = Verdict::budget_exhausted;
    }
    return tr;
}

RegionTag classify_region(const KolmogorovMap& map, const Vec& x, double tol) {
    const Vec f = map.f(x);
    const ConeSplit& split = map.split();
    bool up = true, down = true, k_down = true, k_up = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - 1.0;
        const bool pos = d > tol;
        const bool neg = d < -tol;
        up = up && pos;
        down = down && neg;
        // f <<_K 1: below 1 on H, above 1 on V.
        k_down = k_down && (split.in_h(i) ? neg : pos);
        k_up = k_up && (split.in_h(i) ? pos : neg);
    }
    if (up) return RegionTag::R1;
    if (down) return RegionTag::R2;
    if (k_down) return RegionTag::R3;
    if (k_up) return RegionTag::R4;
    return RegionTag::other;
}

std::optional<Monotonicity> detect_eventual_monotonicity(const OrbitTrace& trace, std::size_t window) {
    const auto& tags = trace.tags;
    std::size_t end = tags.size();
    while (end > 0 && tags[end - 1] == StepTag::none) --end;
    if (end == 0) return std::nullopt;
    const StepTag t = tags[end - 1];
    std::size_t start = end - 1;
    while (start > 0 && tags[start - 1] == t) --start;
    if (end - start < window) return std::nullopt;
    return Monotonicity{t, start};
}

std::optional<std::string> retrotone_violation(const Vec& x, const Vec& y, const Vec& tx, const Vec& ty,
                                               const ConeSplit& split, bool weak) {
    if (!lt_k(x, y, split)) return "T(x) <_K T(y) but not x <_K y";
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::string idx = std::to_string(i + 1);
        if (split.in_h(i)) {
            const bool premise = weak ? tx[i] < ty[i] : y[i] != 0.0;
            if (premise && !(x[i] < y[i])) {
                return (weak ? "T_" + idx + "(x) < T_" + idx + "(y)" : "y_" + idx + " != 0") + " but not x_" + idx +
                       " < y_" + idx;
            }
        } else {
            const bool premise = weak ? tx[i] > ty[i] : x[i] != 0.0;
            if (premise && !(x[i] > y[i])) {
                return (weak ? "T_" + idx + "(x) > T_" + idx + "(y)" : "x_" + idx + " != 0") + " but not x_" + idx +
                       " > y_" + idx;
            }
        }
    }
    return std::nullopt;
}

RetrotoneResult sample_retrotone(const KolmogorovMap& map, std::size_t n_pairs, std::uint64_t seed, bool weak,
                                 Backend backend) {
    constexpr std::size_t chunk = 4096;
    const std::size_t n = map.dim();
    const std::size_t n_chunks = (n_pairs + chunk - 1) / chunk;
    struct ChunkResult {
        std::size_t filtered = 0;
        std::optional<RetrotoneCounterexample> cx;
    };
    std::vector<ChunkResult> results(n_chunks);
    const Vec& r = map.r();

    parallel_for(
        n_chunks,
        [&](std::size_t c) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const std::size_t count = std::min(chunk, n_pairs - c * chunk);
            ChunkResult& out = results[c];
            std::vector<double> xs(n), ys(n);
            for (std::size_t k = 0; k < count; ++k) {
                for (std::size_t i = 0; i < n; ++i) xs[i] = r[i] * unit(rng);
                for (std::size_t i = 0; i < n; ++i) ys[i] = r[i] * unit(rng);
                const Vec x(xs), y(ys);
                const Vec tx = eval_T(map, x);
                const Vec ty = eval_T(map, y);
                if (!lt_k(tx, ty, map.split())) continue;
                ++out.filtered;
                if (out.cx) continue;
                if (auto why = retrotone_violation(x, y, tx, ty, map.split(), weak)) {
                    out.cx = RetrotoneCounterexample{x, y, tx, ty, *why};
                }
            }
        },
        backend);

    RetrotoneResult res;
    res.pairs = n_pairs;
    for (auto& c : results) {
        res.filtered += c.filtered;
        if (!res.counterexample && c.cx) res.counterexample = std::move(c.cx);
    }
    res.acceptance = n_pairs ? static_cast<double>(res.filtered) / static_cast<double>(n_pairs) : 0.0;
    if (res.counterexample) {
        res.status = RetrotoneStatus::fail;
    } else if (res.filtered < 10) {
        res.status = RetrotoneStatus::inconclusive;
    } else {
        res.status = RetrotoneStatus::pass;
    }
    return res;
}

std::vector<OrbitTrace> iterate_batch(const KolmogorovMap& map, const std::vector<Vec>& starts,
                                      const OrbitOptions& opts, Backend backend) {
    std::vector<OrbitTrace> out(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { out[i] = iterate_forward(map, starts[i], opts); }, backend);
    return out;
}

const char* to_string(StepTag t) {
    switch (t) {
        case StepTag::c_up: return "C_UP";
        case StepTag::c_down: return "C_DOWN";
        case StepTag::k_up: return "K_UP";
        case StepTag::k_down: return "K_DOWN";
        case StepTag::none: break;
    }
    return "NONE";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::cycle_suspected: return "cycle_suspected";
        case Verdict::budget_exhausted: return "budget_exhausted";
        case Verdict::escaped_box: return "escaped_box";
    }
    return "?";
}

const char* to_string(RegionTag t) {
    switch (t) {
        case RegionTag::R1: return "R1";
        case RegionTag::R2: return "R2";
        case RegionTag::R3: return "R3";
        case RegionTag::R4: return "R4";
        case RegionTag::other: break;
    }
    return "OTHER";
}

const char* to_string(RetrotoneStatus s) {
    switch (s) {
        case RetrotoneStatus::pass: return "pass";
        case RetrotoneStatus::fail: return "fail";
        case RetrotoneStatus::inconclusive: break;
    }
    return "inconclusive";
}

}  // namespace typek
