#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "semicomp/errors.hpp"

namespace semicomp {

// Uniform spatial grid x_j = lo + j*h, j = 0..n-1.
struct UniformGrid {
    double lo = 0.0;
    double h = 1.0;
    std::size_t n = 0;

    double hi() const { return lo + h * double(n - 1); }
    double operator[](std::size_t j) const { return lo + h * double(j); }

    // Index of the cell containing x (clamped to [0, n-2]).
    std::size_t cell(double x) const {
        if (n < 2) throw DomainError("grid has fewer than two nodes");
        double u = (x - lo) / h;
        if (u <= 0.0) return 0;
        std::size_t j = static_cast<std::size_t>(u);
        return j >= n - 2 ? n - 2 : j;
    }

    bool contains(double x, double margin = 0.0) const {
        return x >= lo + margin && x <= hi() - margin;
    }

    std::vector<double> values() const {
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = (*this)[j];
        return v;
    }
};

} // namespace semicomp
