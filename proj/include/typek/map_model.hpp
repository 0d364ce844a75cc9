#pragma once

// Kolmogorov maps T_i(x) = x_i f_i(x) with exact gradients of f.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typek/cone_order.hpp"
#include "typek/expr.hpp"
#include "typek/linalg.hpp"

namespace typek {

using Params = std::map<std::string, double, std::less<>>;

/// Growth functions f and their exact gradients. Implementations must be
/// immutable and safe for concurrent evaluation.
class GrowthModel {
public:
    virtual ~GrowthModel() = default;
    virtual std::size_t dim() const = 0;
    /// out[i] = f_i(x)
    virtual void eval_f(std::span<const double> x, std::span<double> out) const = 0;
    /// jac(i, j) = d f_i / d x_j
    virtual void eval_grad(std::span<const double> x, Mat& jac) const = 0;
};

class KolmogorovMap {
public:
    KolmogorovMap(std::string name, ConeSplit split, Box domain, Params params,
                  std::shared_ptr<const GrowthModel> model);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return split_.n(); }
    const ConeSplit& split() const noexcept { return split_; }
    const Box& domain() const noexcept { return domain_; }
    const Vec& r() const noexcept { return domain_.hi(); }
    const Params& params() const noexcept { return params_; }
    double param(std::string_view name) const;
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    /// True for the symmetric builtin, which supports diagonal_map_g.
    bool is_example1() const noexcept { return example1_; }
    void mark_example1() noexcept { example1_ = true; }

    /// f(x); throws EvaluationError naming i and x on a non-finite value.
    Vec f(const Vec& x) const;
    /// Df(x), jac(i, j) = d f_i / d x_j.
    Mat grad_f(const Vec& x) const;

    // Raw, allocation-free evaluation for hot loops (no finiteness checks).
    void f_raw(std::span<const double> x, std::span<double> out) const { model_->eval_f(x, out); }
    void grad_raw(std::span<const double> x, Mat& jac) const { model_->eval_grad(x, jac); }

    const GrowthModel& model() const noexcept { return *model_; }

private:
    std::string name_;
    ConeSplit split_;
    Box domain_;
    Params params_;
    std::shared_ptr<const GrowthModel> model_;
    std::vector<std::string> warnings_;
    bool example1_ = false;
};

/// T(x) = (x_1 f_1(x), ..., x_n f_n(x)).
Vec eval_T(const KolmogorovMap& map, const Vec& x);

/// M(x) with m_ij = -(x_i / f_i(x)) d f_i / d x_j. Throws DomainError if some f_i(x) <= 0.
Mat eval_M(const KolmogorovMap& map, const Vec& x);

/// DT(x) = diag(f(x)) (I - M(x)).
Mat eval_DT(const KolmogorovMap& map, const Vec& x);

/// Jacobian of T by the product rule, dT_i/dx_j = delta_ij f_i + x_i d f_i/d x_j.
/// Independent route to DT used for cross-checks.
Mat jacobian_T_direct(const KolmogorovMap& map, const Vec& x);

/// Example 1 family:
///   f_1(x) = 1 + b atan(x_2 - 1 - a (x_1 - 1) - (x_1 - 1)^3),  f_2(x1, x2) = f_1(x2, x1)
/// on [0, (2, 2)] with k = 1. Records a warning when
///   b < min{a / pi, 1 / (8 + 2a + atan(2 + a))}
/// fails.
KolmogorovMap builtin_example1(double a, double b);

/// The bound min{a / pi, 1 / (8 + 2a + atan(2 + a))} on b.
double example1_b_bound(double a);

/// 2 (a + 4) b / (1 - b atan(2 + a)), the row-sum bound on M over [0, (2, 2)].
double example1_norm_bound(double a, double b);

/// Dynamics on the invariant diagonal: g(u) = u (1 + b atan((u - 1)(1 - a - (u - 1)^2))).
double diagonal_map_g(const KolmogorovMap& map, double u);

/// Parse a map definition:
///   dim = <n>; split_k = <k>; r = (<r1>, ..., <rn>); param <name> = <real>; f<i> = <expr>
/// Statements are separated by newlines or ';', '#' starts a comment. Entries of
/// `overrides` replace or extend the file's parameters.
KolmogorovMap parse_map(std::string_view source, const Params& overrides = {});

/// parse_map on the contents of a file; ParseError / Error on failure.
KolmogorovMap load_map_file(const std::string& path, const Params& overrides = {});

}  // namespace typek
