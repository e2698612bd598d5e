#pragma once

// Minimal dense row-major matrix used for block shapes, cluster tables and
// parameter slices.  Not a linear-algebra type; just indexed storage.

#include <cassert>
#include <cstddef>
#include <vector>

namespace cm3 {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return v[static_cast<std::size_t>(r) * cols + c];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return v[static_cast<std::size_t>(r) * cols + c];
    }

    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }

    bool operator==(const Mat& o) const {
        return rows == o.rows && cols == o.cols && v == o.v;
    }
};

}  // namespace cm3
