#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rough/errors.hpp"

namespace rough {

/// Uniform time grid with points t_i = t0 + i*h for i = 0..n.
struct Grid {
    double t0 = 0.0;
    double h = 1.0;
    int n = 1;  // cell count; n+1 grid points

    Grid() = default;
    Grid(double t0_, double h_, int n_) : t0(t0_), h(h_), n(n_) {
        if (h <= 0.0) throw ConfigError("Grid: step must be positive");
        if (n < 1) throw ConfigError("Grid: need at least one cell");
    }

    int points() const { return n + 1; }
    double t(int i) const { return t0 + i * h; }
    double t_end() const { return t0 + n * h; }

    /// Index of time `tt`, which must lie on the grid to within `tol*h`.
    int index_of(double tt, double tol = 1e-9) const {
        double u = (tt - t0) / h;
        int i = static_cast<int>(std::lround(u));
        if (std::abs(u - i) > tol) throw OutOfRange("Grid: time is not a grid point");
        if (i < 0 || i > n) throw OutOfRange("Grid: time outside grid");
        return i;
    }

    /// Number of cells spanned by a duration `v`; errors unless `v` is a step multiple.
    int cells_of(double v, double tol = 1e-9) const {
        double u = v / h;
        int k = static_cast<int>(std::lround(u));
        if (std::abs(u - k) > tol) throw DelayNotOnGrid("duration is not a multiple of the grid step");
        return k;
    }

    bool operator==(const Grid& o) const { return t0 == o.t0 && h == o.h && n == o.n; }
};

/// Vector-valued path sampled on a grid (a 0-increment).
struct Path1 {
    Grid grid;
    int dim = 1;
    std::vector<double> values;  // (grid point, coordinate), row-major

    Path1() = default;
    Path1(const Grid& g, int d) : grid(g), dim(d), values(static_cast<size_t>(g.points()) * d, 0.0) {}

    double& at(int i, int c) { return values[static_cast<size_t>(i) * dim + c]; }
    double at(int i, int c) const { return values[static_cast<size_t>(i) * dim + c]; }
    const double* row(int i) const { return values.data() + static_cast<size_t>(i) * dim; }
    double* row(int i) { return values.data() + static_cast<size_t>(i) * dim; }
};

}  // namespace rough
