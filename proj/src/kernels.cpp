#include "typek/kernels.hpp"

#include <exception>

#include "typek/errors.hpp"

namespace typek {

Grid::Grid(Box box, std::vector<std::size_t> res) : box_(std::move(box)), res_(std::move(res)), size_(1) {
    if (res_.size() != box_.dim()) throw DimensionError("grid resolution does not match box dimension");
    for (std::size_t r : res_) {
        if (r < 2) throw DomainError("grid needs at least 2 points per axis");
        size_ *= r;
    }
}

Grid::Grid(Box box, std::size_t res) : Grid(box, std::vector<std::size_t>(box.dim(), res)) {}

void Grid::point(std::size_t idx, std::span<double> out) const {
    for (std::size_t i = 0; i < res_.size(); ++i) {
        const std::size_t j = idx % res_[i];
        idx /= res_[i];
        const double lo = box_.lo()[i];
        const double hi = box_.hi()[i];
        // Exact endpoints so that faces are sampled exactly.
        out[i] = j + 1 == res_[i] ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(res_[i] - 1);
    }
}

Vec Grid::point(std::size_t idx) const {
    std::vector<double> x(res_.size());
    point(idx, x);
    return Vec(std::move(x));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, Backend backend) {
    std::vector<std::exception_ptr> errors(n);
    const auto ln = static_cast<long long>(n);
    if (backend == Backend::openmp) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < ln; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        for (long long i = 0; i < ln; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

ScanResult reduce(std::vector<PointVerdict>&& v) {
    ScanResult r;
    r.points = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].ok) {
            ++r.failures;
            if (!r.first_failure) {
                r.first_failure = i;
                r.first_failure_verdict = v[i];
            }
        }
        if (i == 0 || v[i].margin < r.worst_verdict.margin) {
            r.worst = i;
            r.worst_verdict = v[i];
        }
    }
    return r;
}

}  // namespace

ScanResult scan_grid(const Grid& grid, const PointKernel& kernel, Backend backend) {
    std::vector<PointVerdict> out(grid.size());
    const std::size_t n = grid.box().dim();
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            std::vector<double> x(n);
            grid.point(i, x);
            out[i] = kernel(x);
        },
        backend);
    return reduce(std::move(out));
}

ScanResult scan_points(std::span<const Vec> points, const PointKernel& kernel, Backend backend) {
    std::vector<PointVerdict> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) { out[i] = kernel(points[i].values()); }, backend);
    return reduce(std::move(out));
}

const char* to_string(Backend b) { return b == Backend::serial ? "serial" : "openmp"; }

}  // namespace typek
