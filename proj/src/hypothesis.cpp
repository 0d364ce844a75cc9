#include "typek/hypothesis.hpp"

#include <algorithm>
#include <cmath>

#include "typek/errors.hpp"

namespace typek {

std::size_t default_grid_res(std::size_t n) { return n == 2 ? 65 : 17; }

bool HypothesisReport::all_pass() const {
    const bool c12 = !criterion12 || (criterion12->pass && criterion12->agrees);
    return a1.pass && a2.pass && invariance.pass && dissipative.pass && rho.pass && c12;
}

std::vector<Vec> HypothesisReport::witnesses() const {
    std::vector<Vec> w;
    for (const auto* p : {&a1.witness, &invariance.witness, &dissipative.witness, &rho.witness})
        if (*p) w.push_back(**p);
    if (criterion12 && criterion12->witness) w.push_back(*criterion12->witness);
    return w;
}

namespace {

Grid domain_grid(const KolmogorovMap& map, std::size_t grid_res) { return Grid(map.domain(), grid_res); }

// Merge a grid scan with a scan over extra points; grid failures come first.
struct Merged {
    std::size_t points = 0;
    std::optional<Vec> failure;
    Vec worst = Vec::zeros(1);
    PointVerdict worst_verdict;
};

Merged merge(const Grid& grid, const ScanResult& g, std::span<const Vec> extra, const ScanResult& e) {
    Merged m;
    m.points = g.points + e.points;
    if (g.first_failure) {
        m.failure = grid.point(*g.first_failure);
    } else if (e.first_failure) {
        m.failure = extra[*e.first_failure];
    }
    m.worst = grid.point(g.worst);
    m.worst_verdict = g.worst_verdict;
    if (e.points > 0 && e.worst_verdict.margin < g.worst_verdict.margin) {
        m.worst = extra[e.worst];
        m.worst_verdict = e.worst_verdict;
    }
    return m;
}

Merged scan_with_extra(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra,
                       const PointKernel& kernel, Backend backend) {
    const Grid grid = domain_grid(map, grid_res);
    const ScanResult g = scan_grid(grid, kernel, backend);
    const ScanResult e = scan_points(extra, kernel, backend);
    return merge(grid, g, extra, e);
}

// Signed margin of one Df entry against the type-K sign pattern.
double a1_margin(const ConeSplit& split, std::size_t i, std::size_t j, double v) {
    const bool same = split.in_h(i) == split.in_h(j);
    if (i == j) return -v;      // must be < 0
    return same ? -v : v;       // within-group <= 0, cross-group >= 0
}

bool a1_ok(std::size_t i, std::size_t j, double margin) { return i == j ? margin > 0.0 : margin >= 0.0; }

}  // namespace

A1Result check_A1_signs(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra, Backend backend) {
    const std::size_t n = map.dim();
    const ConeSplit split = map.split();
    auto kernel = [&](std::span<const double> x) {
        Mat df(n);
        map.grad_raw(x, df);
        PointVerdict v;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (!std::isfinite(df(i, j))) throw EvaluationError("non-finite gradient at x = " + vec_of(x).str());
                const double m = a1_margin(split, i, j, df(i, j));
                if (!a1_ok(i, j, m)) v.ok = false;
                v.margin = std::min(v.margin, m);
            }
        return v;
    };
    const Merged m = scan_with_extra(map, grid_res, extra, kernel, backend);

    A1Result r;
    r.points = m.points;
    r.pass = !m.failure;
    if (m.failure) {
        r.witness = m.failure;
        const Mat df = map.grad_f(*m.failure);
        bool found = false;
        for (std::size_t i = 0; i < n && !found; ++i)
            for (std::size_t j = 0; j < n && !found; ++j)
                if (!a1_ok(i, j, a1_margin(split, i, j, df(i, j)))) {
                    r.row = i;
                    r.col = j;
                    r.value = df(i, j);
                    found = true;
                }
    }

    auto cross = [&](std::span<const double> x) {
        Mat df(n);
        map.grad_raw(x, df);
        PointVerdict v;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (split.in_h(i) != split.in_h(j)) {
                    v.margin = std::min(v.margin, df(i, j));
                    if (!(df(i, j) > 0.0)) v.ok = false;
                }
        return v;
    };
    r.strict_cross = scan_grid(domain_grid(map, grid_res), cross, backend).failures == 0;
    return r;
}

A2Result check_A2_origin(const KolmogorovMap& map, double tol) {
    A2Result r;
    r.f0 = map.f(Vec::zeros(map.dim()));
    r.pass = true;
    for (double v : r.f0)
        if (!(v - 1.0 > tol)) r.pass = false;
    return r;
}

InvarianceResult check_forward_invariance(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra,
                                          Backend backend) {
    const std::size_t n = map.dim();
    const Vec& r = map.r();
    auto kernel = [&](std::span<const double> x) {
        std::vector<double> f(n);
        map.f_raw(x, f);
        PointVerdict v;
        double ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = x[i] * f[i];
            if (!std::isfinite(t)) throw EvaluationError("non-finite T at x = " + vec_of(x).str());
            ratio = std::max(ratio, t / r[i]);
            if (t < 0.0) v.ok = false;
        }
        if (!(ratio < 1.0)) v.ok = false;
        v.value = ratio;
        v.margin = 1.0 - ratio;
        return v;
    };
    const Merged m = scan_with_extra(map, grid_res, extra, kernel, backend);
    InvarianceResult res;
    res.points = m.points;
    res.pass = !m.failure;
    res.witness = m.failure;
    res.max_ratio = m.worst_verdict.value;
    res.argmax = m.worst;
    return res;
}

namespace {

// T_i at the section point with p_i = s and the other group's components from u.
double section_value(const KolmogorovMap& map, const Vec& u, std::size_t i, double s, std::vector<double>& p,
                     std::vector<double>& f) {
    const ConeSplit& split = map.split();
    for (std::size_t j = 0; j < p.size(); ++j) {
        const bool other = split.in_h(i) ? split.in_v(j) : split.in_h(j);
        p[j] = other ? u[j] : 0.0;
    }
    p[i] = s;
    map.f_raw(p, f);
    const double t = s * f[i];
    if (!std::isfinite(t)) throw EvaluationError("non-finite T in dissipativity section at x = " + Vec(p).str());
    return t;
}

}  // namespace

DissipativityResult check_dissipativity_E3(const KolmogorovMap& map, std::span<const double> t_grid, std::size_t s_res,
                                           std::optional<Vec> direction) {
    const std::size_t n = map.dim();
    if (s_res < 2) throw DomainError("s_res must be at least 2");
    const Vec dir = direction ? *direction : Vec::filled(n, 1.0);
    if (dir.size() != n) throw DimensionError("dissipativity direction has wrong dimension");
    for (double d : dir)
        if (d < 0.0) throw DomainError("dissipativity direction must be nonnegative");

    DissipativityResult res;
    res.t_grid.assign(t_grid.begin(), t_grid.end());
    res.s_res = s_res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    std::vector<double> p(n), f(n);
    bool first = true;

    for (double t : t_grid) {
        const Vec u = map.r() + t * dir;
        for (std::size_t i = 0; i < n; ++i) {
            const double ui = u[i];
            std::size_t best_k = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k <= s_res; ++k) {
                const double s = k == s_res ? ui : ui * static_cast<double>(k) / static_cast<double>(s_res);
                const double v = section_value(map, u, i, s, p, f);
                if (v > best) {
                    best = v;
                    best_k = k;
                }
            }
            double best_s = best_k == s_res ? ui : ui * static_cast<double>(best_k) / static_cast<double>(s_res);
            // Golden-section refinement on the two cells around the discrete argmax.
            double lo = ui * static_cast<double>(best_k == 0 ? 0 : best_k - 1) / static_cast<double>(s_res);
            double hi = best_k == s_res ? ui : ui * static_cast<double>(best_k + 1) / static_cast<double>(s_res);
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = hi - g * (hi - lo);
            double d = lo + g * (hi - lo);
            double fc = section_value(map, u, i, c, p, f);
            double fd = section_value(map, u, i, d, p, f);
            for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + ui); ++it) {
                if (fc > fd) {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - g * (hi - lo);
                    fc = section_value(map, u, i, c, p, f);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + g * (hi - lo);
                    fd = section_value(map, u, i, d, p, f);
                }
            }
            if (fc > best) {
                best = fc;
                best_s = c;
            }
            if (fd > best) {
                best = fd;
                best_s = d;
            }
            const double margin = ui - best;
            section_value(map, u, i, best_s, p, f);
            const Vec at(p);
            if (!(margin > 0.0) && !res.witness) {
                res.pass = false;
                res.witness = at;
            }
            if (first || margin < res.worst_margin) {
                first = false;
                res.worst_margin = margin;
                res.worst_t = t;
                res.worst_component = i;
                res.worst_point = at;
            }
        }
    }
    return res;
}

RhoResult check_rho_M(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra, Backend backend) {
    auto kernel = [&](std::span<const double> x) {
        const Mat m = eval_M(map, vec_of(x));
        const double rho = spectral_radius(m);
        PointVerdict v;
        v.value = rho;
        v.margin = 1.0 - rho;
        v.ok = rho < 1.0;
        return v;
    };
    const Merged m = scan_with_extra(map, grid_res, extra, kernel, backend);
    RhoResult r;
    r.points = m.points;
    r.pass = !m.failure;
    r.witness = m.failure;
    r.max_rho = m.worst_verdict.value;
    r.argmax = m.worst;

    auto norm_kernel = [&](std::span<const double> x) {
        const double nrm = eval_M(map, vec_of(x)).norm_inf();
        PointVerdict v;
        v.value = nrm;
        v.margin = -nrm;
        return v;
    };
    r.max_norm_inf = scan_grid(domain_grid(map, grid_res), norm_kernel, backend).worst_verdict.value;
    return r;
}

bool criterion12(const Mat& m) {
    if (m.n() != 2) throw UnsupportedDimension("criterion (12) is planar");
    const double tr = m.trace();
    return tr < std::min(2.0, 1.0 + m.det());
}

bool check_criterion12(const KolmogorovMap& map, const Vec& x) {
    if (map.dim() != 2) throw UnsupportedDimension("criterion (12) is planar");
    return criterion12(eval_M(map, x));
}

Criterion12Result criterion12_equivalence(const KolmogorovMap& map, std::size_t grid_res, Backend backend) {
    if (map.dim() != 2) throw UnsupportedDimension("criterion (12) is planar");
    const Grid grid = domain_grid(map, grid_res);

    enum class Kind { origin, agree, disagree, side };
    struct Row {
        Kind kind = Kind::origin;
        bool c12 = true;
    };
    std::vector<Row> rows(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t idx) {
            const Vec x = grid.point(idx);
            if (norm_inf(x) == 0.0) return;
            const Mat m = eval_M(map, x);
            const double tr = m.trace();
            const double det = m.det();
            Row row;
            row.c12 = criterion12(m);
            if (!(tr > 0.0) || !(tr * tr - 4.0 * det > 0.0)) {
                row.kind = Kind::side;
            } else {
                const bool rho_ok = spectral_radius(m) < 1.0;
                row.kind = rho_ok == row.c12 ? Kind::agree : Kind::disagree;
            }
            rows[idx] = row;
        },
        backend);

    Criterion12Result res;
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        const Row& row = rows[idx];
        if (row.kind == Kind::origin) continue;
        if (!row.c12) {
            res.pass = false;
            if (!res.witness) res.witness = grid.point(idx);
        }
        if (row.kind == Kind::side) {
            res.side_violations.push_back(grid.point(idx));
            continue;
        }
        ++res.compared;
        if (row.kind == Kind::disagree) {
            res.agrees = false;
            res.disagreements.push_back(grid.point(idx));
        }
    }
    return res;
}

HypothesisReport run_hypothesis_gate(const KolmogorovMap& map, const GateOptions& opts, const HypothesisReport* prior) {
    HypothesisReport rep;
    rep.map_name = map.name();
    rep.params = map.params();
    rep.warnings = map.warnings();
    rep.grid_res = opts.grid_res ? opts.grid_res : default_grid_res(map.dim());
    rep.r.assign(map.r().begin(), map.r().end());
    const std::vector<Vec> extra = prior ? prior->witnesses() : std::vector<Vec>{};

    rep.a1 = check_A1_signs(map, rep.grid_res, extra, opts.backend);
    rep.a2 = check_A2_origin(map, opts.tol);
    rep.invariance = check_forward_invariance(map, rep.grid_res, extra, opts.backend);
    rep.dissipative = check_dissipativity_E3(map, opts.t_grid, opts.s_res);
    rep.rho = check_rho_M(map, rep.grid_res, extra, opts.backend);
    if (map.dim() == 2) rep.criterion12 = criterion12_equivalence(map, rep.grid_res, opts.backend);
    if (map.is_example1()) rep.norm_bound = example1_norm_bound(map.param("a"), map.param("b"));
    return rep;
}

}  // namespace typek
