#pragma once

// Sampling certificates for the standing hypotheses: type-K sign structure
// (A1), repelling origin (A2), forward invariance of [0, r], the section
// condition for dissipativity, and rho(M(x)) < 1.

#include <optional>
#include <string>
#include <vector>

#include "typek/kernels.hpp"
#include "typek/map_model.hpp"

namespace typek {

struct A1Result {
    bool pass = true;
    std::size_t points = 0;
    std::optional<Vec> witness;
    std::size_t row = 0;  // offending entry d f_row / d x_col (zero-based)
    std::size_t col = 0;
    double value = 0.0;
    /// d f_i / d x_j > 0 for every cross-group pair at every point.
    bool strict_cross = false;
};

struct A2Result {
    bool pass = false;
    Vec f0 = Vec::zeros(1);
};

struct InvarianceResult {
    bool pass = true;
    std::size_t points = 0;
    double max_ratio = 0.0;  // max_i T_i(x) / r_i
    Vec argmax = Vec::zeros(1);
    std::optional<Vec> witness;
};

struct DissipativityResult {
    bool pass = true;
    std::vector<double> t_grid;
    std::size_t s_res = 0;
    /// min over (t, component) of u_i(t) - max_s T_i(...)
    double worst_margin = 0.0;
    double worst_t = 0.0;
    std::size_t worst_component = 0;
    Vec worst_point = Vec::zeros(1);
    std::optional<Vec> witness;
};

struct RhoResult {
    bool pass = true;
    std::size_t points = 0;
    double max_rho = 0.0;
    Vec argmax = Vec::zeros(1);
    double max_norm_inf = 0.0;
    std::optional<Vec> witness;
};

struct Criterion12Result {
    bool pass = true;          // (12) holds at every compared point
    bool agrees = true;        // (12) <=> rho < 1 wherever the side conditions hold
    std::size_t compared = 0;
    std::vector<Vec> disagreements;
    /// Points (other than 0) with tr(M) <= 0 or tr^2 - 4 det(M) <= 0.
    std::vector<Vec> side_violations;
    std::optional<Vec> witness;  // first point where (12) fails
};

struct GateOptions {
    std::size_t grid_res = 0;  // 0: 65 per axis for n = 2, 17 otherwise
    std::vector<double> t_grid{0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::size_t s_res = 200;
    double tol = 1e-12;
    Backend backend = Backend::openmp;
};

struct HypothesisReport {
    std::string map_name;
    Params params;
    std::vector<std::string> warnings;
    A1Result a1;
    A2Result a2;
    InvarianceResult invariance;
    DissipativityResult dissipative;
    RhoResult rho;
    std::optional<Criterion12Result> criterion12;
    std::optional<double> norm_bound;
    std::size_t grid_res = 0;
    std::vector<double> r;

    bool all_pass() const;
    /// Every witness point recorded in the report.
    std::vector<Vec> witnesses() const;
};

std::size_t default_grid_res(std::size_t n);

/// Within-group entries of Df <= 0 with negative diagonal, cross-group >= 0,
/// on a grid_res^n grid of [0, r] plus `extra` points.
A1Result check_A1_signs(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra = {},
                        Backend backend = Backend::openmp);

/// f(0) >> 1 with margin tol.
A2Result check_A2_origin(const KolmogorovMap& map, double tol = 1e-12);

/// T(grid) inside [0, r).
InvarianceResult check_forward_invariance(const KolmogorovMap& map, std::size_t grid_res,
                                          std::span<const Vec> extra = {}, Backend backend = Backend::openmp);

/// Section condition along u(t) = r + t * direction (default all ones):
///   max_{0 <= s <= u_i(t)} T_i(s e_i + u(t)_V) < u_i(t)  for i in H
/// and symmetrically for j in V with u(t)_H.
DissipativityResult check_dissipativity_E3(const KolmogorovMap& map, std::span<const double> t_grid,
                                           std::size_t s_res, std::optional<Vec> direction = std::nullopt);

/// max over the grid of rho(M(x)).
RhoResult check_rho_M(const KolmogorovMap& map, std::size_t grid_res, std::span<const Vec> extra = {},
                      Backend backend = Backend::openmp);

/// tr(M(x)) < min{2, 1 + det(M(x))}. Planar only.
bool check_criterion12(const KolmogorovMap& map, const Vec& x);
bool criterion12(const Mat& m);

/// Compare (12) with the closed-form rho(M) < 1 at every grid point except 0.
Criterion12Result criterion12_equivalence(const KolmogorovMap& map, std::size_t grid_res,
                                          Backend backend = Backend::openmp);

/// Run every check. When `prior` is given, its witnesses are re-checked too,
/// so refining the grid never turns a failure into a pass.
HypothesisReport run_hypothesis_gate(const KolmogorovMap& map, const GateOptions& opts = {},
                                     const HypothesisReport* prior = nullptr);

}  // namespace typek
