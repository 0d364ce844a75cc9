#pragma once

// Order algebra for the positive orthant C and the type-K cone
//   K = { p : p_i >= 0 for i in H, p_j <= 0 for j in V }
// where H = {1..k} and V = {k+1..n}.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace typek {

/// Immutable point of R^n with finite components.
class Vec {
public:
    explicit Vec(std::vector<double> components);
    Vec(std::initializer_list<double> components);

    static Vec zeros(std::size_t n);
    static Vec filled(std::size_t n, double value);

    std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    std::span<const double> values() const noexcept { return c_; }
    const std::vector<double>& data() const noexcept { return c_; }

    auto begin() const noexcept { return c_.begin(); }
    auto end() const noexcept { return c_.end(); }

    /// Copy with component i replaced.
    Vec with(std::size_t i, double value) const;

    bool operator==(const Vec&) const = default;

    std::string str() const;

private:
    std::vector<double> c_;
};

/// Copy of a span into a Vec.
Vec vec_of(std::span<const double> x);

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);

double norm_inf(const Vec& a);
double dist_inf(const Vec& a, const Vec& b);
double dist2(const Vec& a, const Vec& b);

/// Partition H = {0..k-1}, V = {k..n-1} (zero-based).
class ConeSplit {
public:
    ConeSplit(std::size_t n, std::size_t k);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    bool in_h(std::size_t i) const noexcept { return i < k_; }
    bool in_v(std::size_t i) const noexcept { return i >= k_ && i < n_; }

    bool operator==(const ConeSplit&) const = default;

private:
    std::size_t n_;
    std::size_t k_;
};

/// Closed box [lo, hi].
class Box {
public:
    Box(Vec lo, Vec hi);
    static Box from_origin(const Vec& r);

    const Vec& lo() const noexcept { return lo_; }
    const Vec& hi() const noexcept { return hi_; }
    std::size_t dim() const noexcept { return lo_.size(); }

private:
    Vec lo_;
    Vec hi_;
};

enum class Strength { none, leq, lt, ll };

/// Relation in one cone. When `strength != none`, `x_below` tells whether
/// x <= y (true) or y <= x (false). Equality reports leq with x_below set.
struct ConeRelation {
    Strength strength = Strength::none;
    bool x_below = true;

    bool operator==(const ConeRelation&) const = default;
};

struct OrderRel {
    ConeRelation c_order;
    ConeRelation k_order;

    bool operator==(const OrderRel&) const = default;
};

/// Strongest relation between x and y in both the C-order and the K-order.
/// A component difference counts as nonzero only when its magnitude exceeds tol.
OrderRel compare(const Vec& x, const Vec& y, const ConeSplit& split, double tol = 0.0);

// Directional predicates: "x R y".
bool leq(const Vec& x, const Vec& y, double tol = 0.0);
bool lt(const Vec& x, const Vec& y, double tol = 0.0);
bool ll(const Vec& x, const Vec& y, double tol = 0.0);
bool leq_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol = 0.0);
bool lt_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol = 0.0);
bool ll_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol = 0.0);

enum class Side { H, V };

/// x_H (components outside H zeroed) or x_V.
Vec projection(const Vec& x, Side side, const ConeSplit& split);

/// lo <= x <= hi, or lo <= x << hi when strict_upper.
bool box_contains(const Box& b, const Vec& x, bool strict_upper = false);

const char* to_string(Strength s);

}  // namespace typek
