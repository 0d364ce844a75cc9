#include "typek/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "typek/errors.hpp"
#include "typek/linalg.hpp"

namespace typek {

namespace {

void require_planar(const KolmogorovMap& map) {
    if (map.dim() != 2) throw UnsupportedDimension("fixed-point search is implemented for planar maps");
}

// Root of a function with h(lo) and h(hi) of opposite signs, to machine precision.
double bisect(const std::function<double(double)>& h, double lo, double hi) {
    double hlo = h(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double hm = h(mid);
        if (hm == 0.0) return mid;
        if ((hm > 0.0) == (hlo > 0.0)) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double f_at(const KolmogorovMap& map, std::size_t i, double x1, double x2) {
    std::array<double, 2> x{x1, x2}, f{};
    map.f_raw(x, f);
    if (!std::isfinite(f[i])) throw EvaluationError("f" + std::to_string(i + 1) + " is not finite at x = " + Vec{x1, x2}.str());
    return f[i];
}

}  // namespace

FixedPointRecord classify_fixed_point(const KolmogorovMap& map, const Vec& x, FixedPointKind kind) {
    require_planar(map);
    FixedPointRecord rec;
    rec.location = x;
    rec.kind = kind;
    rec.residual = dist_inf(eval_T(map, x), x);
    const Mat dt = eval_DT(map, x);
    rec.eigenvalues = eigenvalues2(dt);
    const double m0 = std::abs(rec.eigenvalues[0]);
    const double m1 = std::abs(rec.eigenvalues[1]);
    rec.margin = std::min(std::abs(m0 - 1.0), std::abs(m1 - 1.0));
    const double lo = 1.0 - kHyperbolicMargin;
    const double hi = 1.0 + kHyperbolicMargin;
    if (m0 < lo && m1 < lo) {
        rec.stability = Stability::attractor;
    } else if (m0 > hi && m1 > hi) {
        rec.stability = Stability::repeller;
    } else if ((m0 > hi && m1 < lo) || (m0 < lo && m1 > hi)) {
        rec.stability = Stability::saddle;
        const double lambda = (m0 > hi ? rec.eigenvalues[0] : rec.eigenvalues[1]).real();
        auto v = eigenvector2(dt, lambda);
        // Orient into the interior: the zero coordinate of an axial point, else up.
        double s = 1.0;
        if (kind == FixedPointKind::axial1) {
            s = v[1] < 0.0 ? -1.0 : 1.0;
        } else if (kind == FixedPointKind::axial2) {
            s = v[0] < 0.0 ? -1.0 : 1.0;
        } else {
            s = (v[0] != 0.0 ? v[0] : v[1]) < 0.0 ? -1.0 : 1.0;
        }
        rec.unstable_direction = Vec{s * v[0], s * v[1]};
    } else {
        rec.stability = Stability::nonhyperbolic;
    }
    return rec;
}

std::vector<FixedPointRecord> find_axial_fixed_points(const KolmogorovMap& map) {
    require_planar(map);
    const Vec& r = map.r();
    std::vector<FixedPointRecord> out;
    for (std::size_t i = 0; i < 2; ++i) {
        auto h = [&](double t) { return i == 0 ? f_at(map, 0, t, 0.0) - 1.0 : f_at(map, 1, 0.0, t) - 1.0; };
        const double h0 = h(0.0);
        const double h1 = h(r[i]);
        if (!(h0 > 0.0) || !(h1 < 0.0)) {
            throw HypothesisViolation("no sign change of f" + std::to_string(i + 1) + " - 1 on the x" +
                                      std::to_string(i + 1) + "-axis within [0, r]");
        }
        const double q = bisect(h, 0.0, r[i]);
        const Vec loc = i == 0 ? Vec{q, 0.0} : Vec{0.0, q};
        out.push_back(classify_fixed_point(map, loc, i == 0 ? FixedPointKind::axial1 : FixedPointKind::axial2));
    }
    return out;
}

NullclinePolyline trace_nullcline(const KolmogorovMap& map, int which, std::size_t n_samples) {
    require_planar(map);
    if (which != 1 && which != 2) throw DomainError("nullcline index must be 1 or 2");
    if (n_samples < 2) throw DomainError("nullcline needs at least 2 samples");
    const Vec& r = map.r();
    const std::size_t solve_axis = which == 1 ? 0 : 1;
    const std::size_t graph_axis = 1 - solve_axis;
    NullclinePolyline poly;
    poly.which = which;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double g = k + 1 == n_samples ? r[graph_axis]
                                            : r[graph_axis] * static_cast<double>(k) / static_cast<double>(n_samples - 1);
        auto h = [&](double s) {
            return which == 1 ? f_at(map, 0, s, g) - 1.0 : f_at(map, 1, g, s) - 1.0;
        };
        const double h0 = h(0.0);
        const double h1 = h(r[solve_axis]);
        double root;
        if (h0 == 0.0) {
            root = 0.0;
        } else if (h1 == 0.0) {
            root = r[solve_axis];
        } else if ((h0 > 0.0) != (h1 > 0.0)) {
            root = bisect(h, 0.0, r[solve_axis]);
        } else {
            continue;
        }
        poly.samples.push_back(which == 1 ? Vec{root, g} : Vec{g, root});
    }
    return poly;
}

namespace {

// Newton on (f1 - 1, f2 - 1). Returns the refined point and whether it met the residual target.
std::pair<Vec, bool> newton_interior(const KolmogorovMap& map, const Vec& start) {
    Vec x = start;
    auto resid = [&](const Vec& p) {
        const Vec f = map.f(p);
        return std::max(std::abs(f[0] - 1.0), std::abs(f[1] - 1.0));
    };
    double res = resid(x);
    for (int it = 0; it < 50 && res > 0.0; ++it) {
        const Vec f = map.f(x);
        const Mat j = map.grad_f(x);
        std::vector<double> d;
        try {
            d = solve(j, std::vector<double>{1.0 - f[0], 1.0 - f[1]});
        } catch (const NumericalError&) {
            break;
        }
        const Vec cand{x[0] + d[0], x[1] + d[1]};
        const double cres = resid(cand);
        if (!(cres < res)) break;
        x = cand;
        res = cres;
    }
    return {x, res <= 1e-13};
}

}  // namespace

std::vector<FixedPointRecord> find_interior_fixed_points(const KolmogorovMap& map, std::size_t n_samples) {
    require_planar(map);
    const NullclinePolyline l1 = trace_nullcline(map, 1, n_samples);
    const Vec& r = map.r();

    std::vector<Vec> pts;
    std::vector<double> h;
    for (const Vec& p : l1.samples) {
        if (p[0] <= 0.0 || p[1] <= 0.0) continue;
        pts.push_back(p);
        h.push_back(map.f(p)[1] - 1.0);
    }

    std::vector<Vec> candidates;
    std::vector<double> cand_x2;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (std::abs(h[k]) <= 1e-12) {
            candidates.push_back(pts[k]);
            cand_x2.push_back(pts[k][1]);
            continue;
        }
        if (k + 1 < pts.size() && std::abs(h[k + 1]) > 1e-12 && (h[k] > 0.0) != (h[k + 1] > 0.0)) {
            const double w = h[k] / (h[k] - h[k + 1]);
            candidates.push_back(pts[k] + w * (pts[k + 1] - pts[k]));
            cand_x2.push_back(candidates.back()[1]);
        }
    }

    // Coinciding nullcline arcs show up as a dense cluster of crossings.
    const double cluster_span = 0.05 * r[1];
    for (std::size_t k = 0; k + 10 < cand_x2.size(); ++k) {
        if (cand_x2[k + 10] - cand_x2[k] <= cluster_span) {
            throw DegenerateConfiguration("nullclines nearly coincide: more than 10 crossings of l1 and l2 within x2 in [" +
                                          std::to_string(cand_x2[k]) + ", " + std::to_string(cand_x2[k + 10]) + "]");
        }
    }

    std::vector<FixedPointRecord> recs;
    const double spacing = r[1] / static_cast<double>(n_samples - 1);
    for (const Vec& c : candidates) {
        auto [x, ok] = newton_interior(map, c);
        bool coarse = !ok;
        if (dist_inf(x, c) > 10.0 * spacing + 1e-9 || !box_contains(map.domain(), x) || x[0] <= 0.0 || x[1] <= 0.0) {
            x = c;
            coarse = true;
        }
        FixedPointRecord rec = classify_fixed_point(map, x, FixedPointKind::interior);
        rec.coarse = coarse;
        recs.push_back(std::move(rec));
    }

    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.location[0] < b.location[0]; });
    std::vector<FixedPointRecord> out;
    for (auto& rec : recs) {
        if (!out.empty() && dist_inf(out.back().location, rec.location) <= 1e-8) {
            if (rec.residual < out.back().residual) out.back() = std::move(rec);
            continue;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<FixedPointRecord> find_all_fixed_points(const KolmogorovMap& map, std::size_t n_samples) {
    require_planar(map);
    std::vector<FixedPointRecord> out;
    out.push_back(classify_fixed_point(map, Vec::zeros(2), FixedPointKind::origin));
    for (auto& q : find_axial_fixed_points(map)) out.push_back(std::move(q));
    for (auto& p : find_interior_fixed_points(map, n_samples)) out.push_back(std::move(p));
    return out;
}

const char* to_string(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::origin: return "origin";
        case FixedPointKind::axial1: return "axial-1";
        case FixedPointKind::axial2: return "axial-2";
        case FixedPointKind::interior: break;
    }
    return "interior";
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::repeller: return "repeller";
        case Stability::attractor: return "attractor";
        case Stability::saddle: return "saddle";
        case Stability::nonhyperbolic: break;
    }
    return "nonhyperbolic";
}

}  // namespace typek
