#include "typek/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "typek/errors.hpp"
#include "typek/hypothesis.hpp"
#include "typek/orbit.hpp"

namespace typek {

namespace {

Vec lerp(const Vec& a, const Vec& b, double t) { return a + t * (b - a); }

Vec iterate_n(const KolmogorovMap& map, Vec x, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) x = eval_T(map, x);
    return x;
}

// A curve T^k(path(t)), t in [0, 1], kept as parameter/point samples.
struct Front {
    std::vector<double> t;
    std::vector<Vec> p;
};

// Advance every sample by T, then insert parameter midpoints where the image
// is too coarse and drop samples where it is needlessly fine.
void advance(const KolmogorovMap& map, Front& fr, std::size_t k, const std::function<Vec(double)>& path, double gap) {
    for (auto& p : fr.p) p = eval_T(map, p);
    std::size_t i = 0;
    while (i + 1 < fr.p.size()) {
        const double tm = 0.5 * (fr.t[i] + fr.t[i + 1]);
        if (dist2(fr.p[i], fr.p[i + 1]) > gap && tm > fr.t[i] && tm < fr.t[i + 1]) {
            fr.t.insert(fr.t.begin() + static_cast<std::ptrdiff_t>(i + 1), tm);
            fr.p.insert(fr.p.begin() + static_cast<std::ptrdiff_t>(i + 1), iterate_n(map, path(tm), k));
        } else {
            ++i;
        }
    }
    std::vector<double> t{fr.t.front()};
    std::vector<Vec> p{fr.p.front()};
    for (std::size_t j = 1; j + 1 < fr.p.size(); ++j) {
        if (dist2(p.back(), fr.p[j]) < gap / 16.0 && dist2(p.back(), fr.p[j + 1]) <= gap / 2.0) continue;
        t.push_back(fr.t[j]);
        p.push_back(fr.p[j]);
    }
    t.push_back(fr.t.back());
    p.push_back(fr.p.back());
    fr.t = std::move(t);
    fr.p = std::move(p);
}

// Drop points closer than min_spacing while keeping every gap <= max_gap.
std::vector<Vec> thin(const std::vector<Vec>& pts, double min_spacing, double max_gap) {
    if (pts.size() <= 2) return pts;
    std::vector<Vec> out{pts.front()};
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (dist2(out.back(), pts[i]) >= min_spacing || dist2(out.back(), pts[i + 1]) > max_gap) out.push_back(pts[i]);
    }
    if (out.size() > 1 && dist2(out.back(), pts.back()) < min_spacing) out.pop_back();
    out.push_back(pts.back());
    return out;
}

}  // namespace

ManifoldPolyline trace_unstable_manifold(const KolmogorovMap& map, const FixedPointRecord& saddle,
                                         const ManifoldOptions& opts) {
    if (map.dim() != 2) throw UnsupportedDimension("manifold tracing is planar");
    if (saddle.stability != Stability::saddle || !saddle.unstable_direction) {
        throw DomainError("unstable manifold requested for a fixed point that is not a saddle: " + saddle.location.str());
    }
    const auto& ev = saddle.eigenvalues;
    const double lambda_u = std::abs(ev[0]) > 1.0 ? ev[0].real() : ev[1].real();
    if (lambda_u < 0.0) throw DomainError("negative unstable eigenvalue at " + saddle.location.str());
    if (opts.branch != 1 && opts.branch != -1) throw DomainError("branch must be +1 or -1");

    const double arc = opts.arc_resolution > 0.0 ? opts.arc_resolution : 1e-3 * norm_inf(map.r());
    const Vec q = saddle.location;
    const Vec x0 = q + (opts.seed_offset * opts.branch) * *saddle.unstable_direction;
    const Vec x1 = eval_T(map, x0);
    const std::function<Vec(double)> seg = [&](double t) { return lerp(x0, x1, t); };

    ManifoldPolyline out;
    out.anchor = saddle;
    out.arc_resolution = arc;
    std::vector<Vec> pts{q, x0, x1};

    Front fr{{0.0, 1.0}, {x0, x1}};
    Vec lead = x1;
    std::size_t quiet = 0;
    for (std::size_t k = 1; k <= opts.max_iterations; ++k) {
        advance(map, fr, k, seg, arc);
        for (const Vec& p : fr.p) {
            if (!box_contains(map.domain(), p)) {
                throw HypothesisViolation("unstable manifold of " + q.str() + " leaves [0, r] at " + p.str());
            }
        }
        pts.insert(pts.end(), fr.p.begin() + 1, fr.p.end());
        const double move = dist_inf(lead, fr.p.back());
        lead = fr.p.back();
        out.iterations = k;
        quiet = move < opts.stall_tol ? quiet + 1 : 0;
        if (quiet >= opts.stall_iterations) {
            out.stalled = true;
            break;
        }
        if (pts.size() >= opts.max_points) break;
    }
    out.terminal = lead;
    out.points = thin(pts, arc / 4.0, arc);
    return out;
}

Sigma0Result build_sigma0(const KolmogorovMap& map, const FixedPointRecord& p0rec, const FixedPointRecord& p1rec,
                          const Sigma0Options& opts) {
    if (map.dim() != 2) throw UnsupportedDimension("Sigma_0 construction is planar");
    const Vec p0 = p0rec.location;
    const Vec p1 = p1rec.location;
    Sigma0Result res;
    if (dist_inf(p0, p1) <= 1e-8) {
        res.points = {p0};
        return res;
    }
    if (!ll(p0, p1)) throw DomainError("Sigma_0 needs p0 << p1, got " + p0.str() + " and " + p1.str());
    if (opts.boundary_res < 3) throw DomainError("boundary_res must be at least 3");

    const double gap = opts.refine_gap > 0.0 ? opts.refine_gap : 1e-3 * norm_inf(map.r());
    const Vec upper_left{p0[0], p1[1]};
    const Vec lower_right{p1[0], p0[1]};
    auto make_path = [&](const Vec& corner) {
        return std::function<Vec(double)>([&, corner](double t) {
            return t <= 0.5 ? lerp(p0, corner, 2.0 * t) : lerp(corner, p1, 2.0 * t - 1.0);
        });
    };
    const std::array<std::function<Vec(double)>, 2> paths{make_path(upper_left), make_path(lower_right)};

    std::array<Front, 2> fronts;
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < opts.boundary_res; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(opts.boundary_res - 1);
            fronts[c].t.push_back(t);
            fronts[c].p.push_back(paths[c](t));
        }
    }
    for (std::size_t k = 1; k <= opts.n_iterations; ++k)
        for (std::size_t c = 0; c < 2; ++c) advance(map, fronts[c], k, paths[c], gap);

    // Transversals phi(x) = s with phi(p0) = 0, phi(p1) = 1.
    auto phi = [&](const Vec& x) { return 0.5 * ((x[0] - p0[0]) / (p1[0] - p0[0]) + (x[1] - p0[1]) / (p1[1] - p0[1])); };
    const double limit = 100.0 * opts.arc_tol;
    res.points.push_back(p0);
    for (std::size_t m = 1; m + 1 < opts.boundary_res; ++m) {
        const double s = static_cast<double>(m) / static_cast<double>(opts.boundary_res - 1);
        std::vector<Vec> hits;
        for (const Front& fr : fronts) {
            for (std::size_t i = 0; i + 1 < fr.p.size(); ++i) {
                const double a = phi(fr.p[i]) - s;
                const double b = phi(fr.p[i + 1]) - s;
                if (a == 0.0) {
                    hits.push_back(fr.p[i]);
                } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
                    hits.push_back(lerp(fr.p[i], fr.p[i + 1], a / (a - b)));
                }
            }
        }
        if (hits.empty()) throw ResolutionInsufficient("transversal s = " + std::to_string(s) + " misses the image of [p0, p1]");
        auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(),
                                            [](const Vec& u, const Vec& v) { return u[0] < v[0]; });
        const double width = dist2(*lo, *hi);
        res.max_width = std::max(res.max_width, width);
        if (width > limit) {
            throw ResolutionInsufficient("after " + std::to_string(opts.n_iterations) + " iterations the section at s = " +
                                         std::to_string(s) + " still has width " + std::to_string(width) +
                                         " (limit " + std::to_string(limit) + ")");
        }
        res.points.push_back(0.5 * (*lo + *hi));
    }
    res.points.push_back(p1);
    return res;
}

MonotoneFlag check_monotone(const std::string& name, const std::vector<Vec>& curve, bool strict, std::size_t max_pairs,
                            double tol) {
    MonotoneFlag flag;
    flag.curve = name;
    flag.required = strict ? "ll" : "lt";
    flag.holds = true;
    auto rel = [&](const Vec& a, const Vec& b) { return strict ? ll(a, b, tol) : lt(a, b, tol); };
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++flag.pairs;
        if (!rel(curve[i], curve[i + 1])) flag.holds = false;
    }
    if (n > 2) {
        const std::size_t all = n * (n - 1) / 2;
        if (all <= max_pairs) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 2; j < n; ++j) {
                    ++flag.pairs;
                    if (!rel(curve[i], curve[j])) flag.holds = false;
                }
        } else {
            std::mt19937_64 rng(0x5eed);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t s = 0; s < max_pairs; ++s) {
                std::size_t i = pick(rng), j = pick(rng);
                if (i == j) continue;
                if (i > j) std::swap(i, j);
                ++flag.pairs;
                if (!rel(curve[i], curve[j])) flag.holds = false;
            }
        }
    }
    return flag;
}

UnorderedFlag check_unordered(const std::string& name, const std::vector<Vec>& points, const ConeSplit& split,
                              std::size_t n_pairs, std::uint64_t seed, double tol) {
    UnorderedFlag flag;
    flag.curves = name;
    flag.holds = true;
    if (points.size() < 2) return flag;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    for (std::size_t s = 0; s < n_pairs; ++s) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        ++flag.pairs;
        if (i == j) continue;
        if (ll_k(points[i], points[j], split, tol) || ll_k(points[j], points[i], split, tol)) flag.holds = false;
    }
    return flag;
}

AttractorDecomposition assemble_decomposition(const KolmogorovMap& map, const AttractorOptions& opts) {
    if (map.dim() != 2) throw UnsupportedDimension("attractor decomposition is planar");
    AttractorDecomposition d;
    d.fixed_points = find_all_fixed_points(map, opts.fixed_point_samples);
    std::vector<FixedPointRecord> interior;
    for (const auto& fp : d.fixed_points) {
        if (fp.kind == FixedPointKind::axial1) d.q1 = fp;
        if (fp.kind == FixedPointKind::axial2) d.q2 = fp;
        if (fp.kind == FixedPointKind::interior) interior.push_back(fp);
    }
    if (interior.empty()) throw HypothesisViolation("no interior fixed point found");
    d.p0 = interior.front();
    d.p1 = interior.back();

    d.sigma_h = trace_unstable_manifold(map, d.q1, opts.manifold);
    d.sigma_v = trace_unstable_manifold(map, d.q2, opts.manifold);
    d.sigma_0 = build_sigma0(map, d.p0, d.p1, opts.sigma0);

    d.strict_cross = check_A1_signs(map, default_grid_res(2)).strict_cross;
    d.monotone_flags.push_back(check_monotone("sigma_H", d.sigma_h.points, d.strict_cross));
    d.monotone_flags.push_back(check_monotone("sigma_V", d.sigma_v.points, d.strict_cross));
    if (!d.sigma0_is_point()) d.monotone_flags.push_back(check_monotone("sigma_0", d.sigma_0.points, true));

    auto join = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
        std::vector<Vec> u = a;
        u.insert(u.end(), b.begin(), b.end());
        return u;
    };
    d.unordered_flags.push_back(check_unordered("sigma_H+sigma_0", join(d.sigma_h.points, d.sigma_0.points),
                                                map.split(), opts.unordered_pairs, opts.seed));
    d.unordered_flags.push_back(check_unordered("sigma_V+sigma_0", join(d.sigma_v.points, d.sigma_0.points),
                                                map.split(), opts.unordered_pairs, opts.seed + 1));

    d.nullclines.push_back(trace_nullcline(map, 1, 401));
    d.nullclines.push_back(trace_nullcline(map, 2, 401));
    return d;
}

BasinVerdict basin_of_repulsion_test(const KolmogorovMap& map, const Vec& x, std::size_t max_steps, double tol) {
    try {
        const OrbitTrace tr = iterate_backward(map, x, max_steps, tol);
        if (tr.verdict == Verdict::escaped_box) return BasinVerdict::outside;
        if (tr.verdict == Verdict::converged && tr.limit) {
            return norm_inf(*tr.limit) < tol ? BasinVerdict::inside
                   : norm_inf(*tr.limit) > 100.0 * tol ? BasinVerdict::outside
                                                       : BasinVerdict::undecided;
        }
    } catch (const NumericalError&) {
    }
    return BasinVerdict::undecided;
}

double distance_to_polyline(const Vec& p, const std::vector<Vec>& poly) {
    if (poly.empty()) throw DomainError("distance to an empty polyline");
    double best = dist2(p, poly.front());
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec d = poly[i + 1] - poly[i];
        double len2 = 0.0, dot = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            len2 += d[c] * d[c];
            dot += (p[c] - poly[i][c]) * d[c];
        }
        const double t = len2 > 0.0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, dist2(p, poly[i] + t * d));
    }
    return best;
}

namespace {

std::vector<Vec> densify(const std::vector<Vec>& poly, double step) {
    std::vector<Vec> out;
    if (poly.empty()) return out;
    out.push_back(poly.front());
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const double len = dist2(poly[i], poly[i + 1]);
        const auto pieces = static_cast<std::size_t>(std::ceil(len / step));
        for (std::size_t k = 1; k <= pieces; ++k)
            out.push_back(lerp(poly[i], poly[i + 1], static_cast<double>(k) / static_cast<double>(pieces)));
    }
    return out;
}

}  // namespace

double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b, double step) {
    double h = 0.0;
    for (const Vec& p : densify(a, step)) h = std::max(h, distance_to_polyline(p, b));
    for (const Vec& p : densify(b, step)) h = std::max(h, distance_to_polyline(p, a));
    return h;
}

const char* to_string(BasinVerdict v) {
    switch (v) {
        case BasinVerdict::inside: return "inside";
        case BasinVerdict::outside: return "outside";
        case BasinVerdict::undecided: break;
    }
    return "boundary-undecided";
}

}  // namespace typek
