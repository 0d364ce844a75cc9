#pragma once

// Planar global attractor Sigma = Sigma_H u Sigma_0 u Sigma_V: unstable
// manifolds of the axial saddles, the limit curve of T^n([p0, p1]), and the
// basin of repulsion of the origin.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "typek/fixed_points.hpp"
#include "typek/map_model.hpp"

namespace typek {

struct ManifoldOptions {
    double seed_offset = 1e-6;
    std::size_t max_points = 200000;
    double arc_resolution = 0.0;  // 0: 1e-3 * ||r||_inf
    /// +1 follows the oriented unstable direction, -1 the opposite branch
    /// (only meaningful for interior saddles).
    int branch = 1;
    double stall_tol = 1e-10;
    std::size_t stall_iterations = 20;
    std::size_t max_iterations = 100000;
};

struct ManifoldPolyline {
    FixedPointRecord anchor;
    std::vector<Vec> points;  // from the anchor outward; points[0] is the anchor
    Vec terminal = Vec::zeros(2);
    double arc_resolution = 0.0;
    std::size_t iterations = 0;
    bool stalled = false;  // false: stopped on max_points / max_iterations
};

ManifoldPolyline trace_unstable_manifold(const KolmogorovMap& map, const FixedPointRecord& saddle,
                                         const ManifoldOptions& opts = {});

struct Sigma0Options {
    std::size_t n_iterations = 400;
    std::size_t boundary_res = 401;  // transversals and initial boundary points
    double arc_tol = 1e-8;           // widths must shrink below 100 * arc_tol
    double refine_gap = 0.0;         // 0: 1e-3 * ||r||_inf
};

struct Sigma0Result {
    std::vector<Vec> points;  // p0 ... p1
    double max_width = 0.0;   // widest transversal section of the n-th image
};

/// Limit curve of T^n([p0, p1]); the single point p0 when p0 == p1.
/// Throws ResolutionInsufficient when a transversal section stays wider
/// than 100 * arc_tol.
Sigma0Result build_sigma0(const KolmogorovMap& map, const FixedPointRecord& p0, const FixedPointRecord& p1,
                          const Sigma0Options& opts = {});

struct MonotoneFlag {
    std::string curve;
    std::string required;  // "ll" or "lt"
    bool holds = false;
    std::size_t pairs = 0;
};

struct UnorderedFlag {
    std::string curves;
    bool holds = false;
    std::size_t pairs = 0;
};

struct AttractorOptions {
    std::size_t fixed_point_samples = 2001;
    ManifoldOptions manifold;
    Sigma0Options sigma0;
    std::size_t unordered_pairs = 10000;
    std::uint64_t seed = 1;
};

struct AttractorDecomposition {
    std::vector<FixedPointRecord> fixed_points;
    FixedPointRecord q1;
    FixedPointRecord q2;
    FixedPointRecord p0;
    FixedPointRecord p1;
    ManifoldPolyline sigma_h;
    ManifoldPolyline sigma_v;
    Sigma0Result sigma_0;
    bool strict_cross = false;  // d f1/d x2 > 0 and d f2/d x1 > 0 on the grid
    std::vector<MonotoneFlag> monotone_flags;
    std::vector<UnorderedFlag> unordered_flags;
    std::vector<NullclinePolyline> nullclines;

    bool sigma0_is_point() const { return sigma_0.points.size() == 1; }
};

AttractorDecomposition assemble_decomposition(const KolmogorovMap& map, const AttractorOptions& opts = {});

/// Every pair (subsampled to at most max_pairs) of points along the curve is
/// related by << (or < when `strict` is false) in the order of the curve.
MonotoneFlag check_monotone(const std::string& name, const std::vector<Vec>& curve, bool strict,
                            std::size_t max_pairs = 20000, double tol = 1e-12);

/// No sampled pair from the union of the curves is related by <<_K.
UnorderedFlag check_unordered(const std::string& name, const std::vector<Vec>& points, const ConeSplit& split,
                              std::size_t n_pairs, std::uint64_t seed, double tol = 1e-12);

enum class BasinVerdict { inside, outside, undecided };

/// Membership in the basin of repulsion of 0 via the backward orbit.
BasinVerdict basin_of_repulsion_test(const KolmogorovMap& map, const Vec& x, std::size_t max_steps = 100000,
                                     double tol = 1e-9);

/// Hausdorff distance between polylines, both densified to `step`.
double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b, double step);

/// Distance from p to the polyline.
double distance_to_polyline(const Vec& p, const std::vector<Vec>& poly);

const char* to_string(BasinVerdict v);

}  // namespace typek
