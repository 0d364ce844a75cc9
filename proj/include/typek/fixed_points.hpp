#pragma once

// Fixed points of planar maps: origin, one axial point per axis, and interior
// points as intersections of the nullclines l1 = {f1 = 1}, l2 = {f2 = 1}.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "typek/map_model.hpp"

namespace typek {

enum class FixedPointKind { origin, axial1, axial2, interior };
enum class Stability { repeller, attractor, saddle, nonhyperbolic };

struct FixedPointRecord {
    Vec location = Vec::zeros(2);
    double residual = 0.0;  // ||T(x) - x||_inf
    FixedPointKind kind = FixedPointKind::interior;
    std::array<std::complex<double>, 2> eigenvalues{};
    Stability stability = Stability::nonhyperbolic;
    /// Smallest | |lambda| - 1 | over both eigenvalues.
    double margin = 0.0;
    /// Unit eigenvector of the expanding eigenvalue, saddles only.
    std::optional<Vec> unstable_direction;
    /// Newton polish did not reach the residual target.
    bool coarse = false;
};

struct NullclinePolyline {
    int which = 1;  // 1: f1 = 1 sampled over x2, 2: f2 = 1 sampled over x1
    std::vector<Vec> samples;
};

/// Classification margin on |lambda| - 1.
inline constexpr double kHyperbolicMargin = 1e-9;

/// Eigen-classification of DT at x.
FixedPointRecord classify_fixed_point(const KolmogorovMap& map, const Vec& x, FixedPointKind kind);

/// Q1 = (q1, 0) and Q2 = (0, q2) by bisection to 1e-14 on f1(t, 0) = 1, f2(0, t) = 1.
/// Throws HypothesisViolation when a bracket shows no sign change.
std::vector<FixedPointRecord> find_axial_fixed_points(const KolmogorovMap& map);

/// Samples of l1 (x1 solved for each x2 on a uniform grid) or l2 (x2 solved
/// for each x1). Grid values without a root in [0, r] are skipped.
NullclinePolyline trace_nullcline(const KolmogorovMap& map, int which, std::size_t n_samples = 2001);

/// Interior fixed points from sign changes of f2 - 1 along l1, refined by
/// 2-D Newton, deduplicated within 1e-8 and sorted by x1.
/// Throws DegenerateConfiguration when more than 10 crossings cluster.
std::vector<FixedPointRecord> find_interior_fixed_points(const KolmogorovMap& map, std::size_t n_samples = 2001);

/// Origin, Q1, Q2 and the interior points, in that order.
std::vector<FixedPointRecord> find_all_fixed_points(const KolmogorovMap& map, std::size_t n_samples = 2001);

const char* to_string(FixedPointKind k);
const char* to_string(Stability s);

}  // namespace typek
