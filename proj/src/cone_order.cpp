#include "typek/cone_order.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "typek/errors.hpp"

namespace typek {

namespace {

void require_finite(const std::vector<double>& c) {
    if (c.empty()) throw DimensionError("Vec must have at least one component");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!std::isfinite(c[i])) {
            throw DomainError("non-finite component " + std::to_string(i + 1) + " in Vec");
        }
    }
}

void require_same_dim(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw DimensionError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
}

// Sign classes of a difference vector, +1 / -1 / 0 with margin tol.
struct SignCount {
    std::size_t pos = 0;
    std::size_t neg = 0;
    std::size_t zero = 0;
};

ConeRelation classify(const SignCount& s, std::size_t n) {
    ConeRelation rel;
    if (s.neg == 0) {
        rel.x_below = true;
        rel.strength = s.pos == n ? Strength::ll : (s.pos == 0 ? Strength::leq : Strength::lt);
    } else if (s.pos == 0) {
        rel.x_below = false;
        rel.strength = s.neg == n ? Strength::ll : Strength::lt;
    }
    return rel;
}

}  // namespace

Vec::Vec(std::vector<double> components) : c_(std::move(components)) { require_finite(c_); }

Vec::Vec(std::initializer_list<double> components) : c_(components) { require_finite(c_); }

Vec Vec::zeros(std::size_t n) { return Vec(std::vector<double>(n, 0.0)); }

Vec Vec::filled(std::size_t n, double value) { return Vec(std::vector<double>(n, value)); }

Vec Vec::with(std::size_t i, double value) const {
    auto c = c_;
    c.at(i) = value;
    return Vec(std::move(c));
}

std::string Vec::str() const {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i];
    os << ')';
    return os.str();
}

Vec vec_of(std::span<const double> x) { return Vec(std::vector<double>(x.begin(), x.end())); }

Vec operator+(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return Vec(std::move(c));
}

Vec operator-(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
    return Vec(std::move(c));
}

Vec operator*(double s, const Vec& a) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * a[i];
    return Vec(std::move(c));
}

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double dist_inf(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double dist2(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

ConeSplit::ConeSplit(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (k < 1 || k >= n) {
        throw DimensionError("cone split requires 1 <= k < n, got n=" + std::to_string(n) +
                             ", k=" + std::to_string(k));
    }
}

Box::Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    require_same_dim(lo_, hi_);
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (lo_[i] > hi_[i]) throw DomainError("box requires lo <= hi componentwise");
    }
}

Box Box::from_origin(const Vec& r) { return Box(Vec::zeros(r.size()), r); }

namespace {

// k = 0 is allowed here; the C-order part never looks at the split.
OrderRel relations(const Vec& x, const Vec& y, std::size_t k, double tol) {
    require_same_dim(x, y);
    SignCount c;
    SignCount kc;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - x[i];
        const int s = d > tol ? 1 : (d < -tol ? -1 : 0);
        const int sk = i < k ? s : -s;
        (s > 0 ? c.pos : s < 0 ? c.neg : c.zero)++;
        (sk > 0 ? kc.pos : sk < 0 ? kc.neg : kc.zero)++;
    }
    return {classify(c, x.size()), classify(kc, x.size())};
}

void require_split_dim(const Vec& x, const ConeSplit& split) {
    if (x.size() != split.n()) {
        throw DimensionError("vector dimension " + std::to_string(x.size()) +
                             " does not match split dimension " + std::to_string(split.n()));
    }
}

bool at_least(const ConeRelation& r, Strength s) {
    return r.x_below && r.strength != Strength::none && static_cast<int>(r.strength) >= static_cast<int>(s);
}

}  // namespace

OrderRel compare(const Vec& x, const Vec& y, const ConeSplit& split, double tol) {
    require_split_dim(x, split);
    return relations(x, y, split.k(), tol);
}

bool leq(const Vec& x, const Vec& y, double tol) {
    return at_least(relations(x, y, 0, tol).c_order, Strength::leq);
}
bool lt(const Vec& x, const Vec& y, double tol) {
    return at_least(relations(x, y, 0, tol).c_order, Strength::lt);
}
bool ll(const Vec& x, const Vec& y, double tol) {
    return at_least(relations(x, y, 0, tol).c_order, Strength::ll);
}
bool leq_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol) {
    return at_least(compare(x, y, split, tol).k_order, Strength::leq);
}
bool lt_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol) {
    return at_least(compare(x, y, split, tol).k_order, Strength::lt);
}
bool ll_k(const Vec& x, const Vec& y, const ConeSplit& split, double tol) {
    return at_least(compare(x, y, split, tol).k_order, Strength::ll);
}

Vec projection(const Vec& x, Side side, const ConeSplit& split) {
    if (x.size() != split.n()) throw DimensionError("projection: dimension mismatch");
    std::vector<double> c(x.begin(), x.end());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const bool keep = side == Side::H ? split.in_h(i) : split.in_v(i);
        if (!keep) c[i] = 0.0;
    }
    return Vec(std::move(c));
}

bool box_contains(const Box& b, const Vec& x, bool strict_upper) {
    require_same_dim(b.lo(), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < b.lo()[i]) return false;
        if (strict_upper ? !(x[i] < b.hi()[i]) : x[i] > b.hi()[i]) return false;
    }
    return true;
}

const char* to_string(Strength s) {
    switch (s) {
        case Strength::none: return "none";
        case Strength::leq: return "leq";
        case Strength::lt: return "lt";
        case Strength::ll: return "ll";
    }
    return "none";
}

}  // namespace typek
