#include "typek/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "typek/errors.hpp"

namespace typek {

Mat Mat::identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Mat::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Mat::det() const {
    if (n_ == 1) return a_[0];
    if (n_ == 2) return a_[0] * a_[3] - a_[1] * a_[2];
    std::vector<double> lu = a_;
    double d = 1.0;
    for (std::size_t c = 0; c < n_; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n_; ++r) {
            if (std::abs(lu[r * n_ + c]) > std::abs(lu[p * n_ + c])) p = r;
        }
        if (lu[p * n_ + c] == 0.0) return 0.0;
        if (p != c) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(lu[p * n_ + j], lu[c * n_ + j]);
            d = -d;
        }
        d *= lu[c * n_ + c];
        for (std::size_t r = c + 1; r < n_; ++r) {
            const double f = lu[r * n_ + c] / lu[c * n_ + c];
            for (std::size_t j = c; j < n_; ++j) lu[r * n_ + j] -= f * lu[c * n_ + j];
        }
    }
    return d;
}

double Mat::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

Mat operator-(const Mat& a, const Mat& b) {
    if (a.n() != b.n()) throw DimensionError("matrix dimension mismatch");
    Mat c(a.n());
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

std::vector<double> operator*(const Mat& a, std::span<const double> x) {
    if (x.size() != a.n()) throw DimensionError("matrix-vector dimension mismatch");
    std::vector<double> y(a.n(), 0.0);
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

std::vector<double> solve(const Mat& a, std::span<const double> b) {
    const std::size_t n = a.n();
    if (b.size() != n) throw DimensionError("solve: dimension mismatch");
    Mat m = a;
    std::vector<double> x(b.begin(), b.end());
    const double scale = std::max(a.norm_inf(), 1e-300);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        }
        if (std::abs(m(p, c)) <= 1e-14 * scale) throw NumericalError("singular matrix in linear solve");
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            std::swap(x[p], x[c]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
            x[r] -= f * x[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        double s = x[c];
        for (std::size_t j = c + 1; j < n; ++j) s -= m(c, j) * x[j];
        x[c] = s / m(c, c);
    }
    return x;
}

std::array<std::complex<double>, 2> eigenvalues2(const Mat& a) {
    if (a.n() != 2) throw UnsupportedDimension("eigenvalues2 needs a 2x2 matrix");
    const double tr = a.trace();
    const double det = a.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // 2*rho = tr +- sqrt(tr^2 - 4 det); the smaller root via det / larger avoids cancellation.
        const double big = 0.5 * (tr + std::copysign(sq, tr));
        const double small = big != 0.0 ? det / big : 0.0;
        const double hi = std::max(big, small);
        const double lo = std::min(big, small);
        return {std::complex<double>(hi, 0.0), std::complex<double>(lo, 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

std::array<double, 2> eigenvector2(const Mat& a, double lambda) {
    if (a.n() != 2) throw UnsupportedDimension("eigenvector2 needs a 2x2 matrix");
    // Null vector of (A - lambda I) from whichever row is better conditioned.
    const double r0x = a(0, 0) - lambda, r0y = a(0, 1);
    const double r1x = a(1, 0), r1y = a(1, 1) - lambda;
    double vx, vy;
    if (std::hypot(r0x, r0y) >= std::hypot(r1x, r1y)) {
        vx = -r0y;
        vy = r0x;
    } else {
        vx = -r1y;
        vy = r1x;
    }
    const double nrm = std::hypot(vx, vy);
    if (nrm == 0.0) return {1.0, 0.0};  // A = lambda I: every direction is an eigenvector
    return {vx / nrm, vy / nrm};
}

double spectral_radius(const Mat& a, int max_iter) {
    const std::size_t n = a.n();
    if (n == 1) return std::abs(a(0, 0));
    if (n == 2) {
        const auto ev = eigenvalues2(a);
        return std::max(std::abs(ev[0]), std::abs(ev[1]));
    }
    // |A| + I is primitive-friendly: its Perron root is rho(|A|) + 1 and the
    // shift removes the oscillation of cyclic patterns.
    Mat abs_a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) abs_a(i, j) = std::abs(a(i, j)) + (i == j ? 1.0 : 0.0);
    std::vector<double> v(n, 1.0);
    double est = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        auto w = abs_a * std::span<const double>(v);
        double nrm = 0.0;
        for (double x : w) nrm = std::max(nrm, x);
        for (auto& x : w) x /= nrm;
        if (it > 0 && std::abs(nrm - est) <= 1e-10 * nrm) return nrm - 1.0;
        est = nrm;
        v = std::move(w);
    }
    throw NumericalError("power iteration for spectral radius did not converge");
}

}  // namespace typek
