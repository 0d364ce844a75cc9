#pragma once

// Data-parallel kernels. Every kernel has a serial reference and an OpenMP
// version; both return identical results for any thread count.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typek/cone_order.hpp"

namespace typek {

enum class Backend { serial, openmp };

/// Uniform grid with res[i] points on axis i of a box (faces included).
class Grid {
public:
    Grid(Box box, std::vector<std::size_t> res);
    /// Same resolution on every axis.
    Grid(Box box, std::size_t res);

    const Box& box() const noexcept { return box_; }
    const std::vector<std::size_t>& res() const noexcept { return res_; }
    std::size_t size() const noexcept { return size_; }
    /// Point number idx; axis 0 varies fastest.
    void point(std::size_t idx, std::span<double> out) const;
    Vec point(std::size_t idx) const;

private:
    Box box_;
    std::vector<std::size_t> res_;
    std::size_t size_;
};

/// Outcome of a per-point check. `margin` is signed: larger is safer, a
/// failing point should have margin <= 0. `value` is the quantity reported
/// at the worst point (rho, max ratio, ...).
struct PointVerdict {
    bool ok = true;
    double margin = std::numeric_limits<double>::infinity();
    double value = 0.0;
    std::string detail;
};

using PointKernel = std::function<PointVerdict(std::span<const double> x)>;

struct ScanResult {
    std::size_t points = 0;
    std::size_t failures = 0;
    /// Lowest failing index and its verdict.
    std::optional<std::size_t> first_failure;
    PointVerdict first_failure_verdict;
    /// Index with the smallest margin (lowest index on ties).
    std::size_t worst = 0;
    PointVerdict worst_verdict;
};

/// Evaluate `kernel` at every grid point. An exception thrown at some point
/// is rethrown after the scan (the one at the lowest index).
ScanResult scan_grid(const Grid& grid, const PointKernel& kernel, Backend backend = Backend::openmp);

/// Evaluate `kernel` at explicit points, indexed in order.
ScanResult scan_points(std::span<const Vec> points, const PointKernel& kernel, Backend backend = Backend::openmp);

/// Run body(i) for i in [0, n). Exceptions are captured and the one at the
/// lowest index rethrown afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, Backend backend);

const char* to_string(Backend b);

}  // namespace typek
