#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "typek/cone_order.hpp"

namespace typek {

/// Small dense square matrix, row-major.
class Mat {
public:
    explicit Mat(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    static Mat identity(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    double trace() const;
    /// Determinant for n <= 2 in closed form, LU otherwise.
    double det() const;
    double norm_inf() const;

    bool operator==(const Mat&) const = default;

private:
    std::size_t n_;
    std::vector<double> a_;
};

Mat operator-(const Mat& a, const Mat& b);
std::vector<double> operator*(const Mat& a, std::span<const double> x);

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Throws NumericalError on a (numerically) singular matrix.
std::vector<double> solve(const Mat& a, std::span<const double> b);

/// Eigenvalues of a 2x2 matrix from tr and det, larger real part first.
std::array<std::complex<double>, 2> eigenvalues2(const Mat& a);

/// Unit eigenvector of a 2x2 matrix for a real eigenvalue.
std::array<double, 2> eigenvector2(const Mat& a, double lambda);

/// Spectral radius. Closed form for n = 1, 2; for larger n, power iteration on
/// |A| (an upper bound for rho(A)) to relative change 1e-10.
/// Throws NumericalError when power iteration does not settle in max_iter steps.
double spectral_radius(const Mat& a, int max_iter = 10000);

}  // namespace typek
