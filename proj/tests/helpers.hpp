#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rough/grid.hpp"

namespace testutil {

using rough::Grid;
using rough::Path1;

inline Path1 random_path(const Grid& g, int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Path1 x(g, d);
    for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        x.at(0, c) = 0.0;
        for (int i = 1; i <= g.n; ++i) {
            acc += gauss(rng) * std::sqrt(g.h);
            x.at(i, c) = acc;
        }
    }
    return x;
}

/// Piecewise-linear evaluation of a sampled path at an arbitrary time.
inline double eval_pl(const Path1& x, double t, int c) {
    double u = (t - x.grid.t0) / x.grid.h;
    int i = static_cast<int>(std::floor(u));
    if (i < 0) i = 0;
    if (i >= x.grid.n) i = x.grid.n - 1;
    double th = u - i;
    return (1.0 - th) * x.at(i, c) + th * x.at(i + 1, c);
}

/// Brute-force delayed area of the piecewise-linear interpolant,
///   x2(v1, 0)_{st} = int_s^t (x(w - v1) - x(s - v1)) (x) dx(w),
/// by midpoint quadrature on `sub` subdivisions per cell (exact for the
/// interpolant when shifts are step multiples).
inline std::vector<double> oracle_area(const Path1& x, double v1, double s, double t, int sub) {
    int d = x.dim;
    std::vector<double> A(static_cast<size_t>(d) * d, 0.0);
    double hf = x.grid.h / sub;
    int M = static_cast<int>(std::lround((t - s) / hf));
    for (int k = 0; k < M; ++k) {
        double w0 = s + k * hf, w1 = s + (k + 1) * hf, wm = 0.5 * (w0 + w1);
        for (int i = 0; i < d; ++i) {
            double f = eval_pl(x, wm - v1, i) - eval_pl(x, s - v1, i);
            for (int j = 0; j < d; ++j)
                A[static_cast<size_t>(i) * d + j] += f * (eval_pl(x, w1, j) - eval_pl(x, w0, j));
        }
    }
    return A;
}

/// Brute-force doubly delayed volume,
///   x3(v1, v2)_{st} = int_s^t x2_{sw}(v1, v2) (x) dx(w),
///   x2_{sw}(v1, v2) = x2_{s-v2, w-v2}(v1, 0),
/// with the inner areas accumulated by midpoint quadrature and the outer
/// integral by Simpson (exact for the interpolant on aligned shifts).
inline std::vector<double> oracle_volume(const Path1& x, double v1, double v2, double s, double t,
                                         int sub) {
    int d = x.dim;
    size_t d2 = static_cast<size_t>(d) * d;
    std::vector<double> V(d2 * d, 0.0);
    double hf = x.grid.h / sub;
    int M = static_cast<int>(std::lround((t - s) / hf));
    // Inner area G(u) = x2_{s-v2, u}(v1, 0) at fine nodes and midpoints of the
    // shifted variable u = w - v2.
    std::vector<double> Gnode(d2, 0.0), Gmid(d2);
    double s2 = s - v2;
    auto inner_step = [&](double u0, double u1, std::vector<double>& dst,
                          const std::vector<double>& base) {
        double um = 0.5 * (u0 + u1);
        for (int i = 0; i < d; ++i) {
            double f = eval_pl(x, um - v1, i) - eval_pl(x, s2 - v1, i);
            for (int j = 0; j < d; ++j)
                dst[static_cast<size_t>(i) * d + j] =
                    base[static_cast<size_t>(i) * d + j] +
                    f * (eval_pl(x, u1, j) - eval_pl(x, u0, j));
        }
    };
    for (int k = 0; k < M; ++k) {
        double u0 = s2 + k * hf, u1 = s2 + (k + 1) * hf, um = 0.5 * (u0 + u1);
        inner_step(u0, um, Gmid, Gnode);
        std::vector<double> Gnext(d2);
        inner_step(u0, u1, Gnext, Gnode);
        double w0 = s + k * hf, w1 = s + (k + 1) * hf;
        for (size_t ij = 0; ij < d2; ++ij) {
            double simpson = (Gnode[ij] + 4.0 * Gmid[ij] + Gnext[ij]) / 6.0;
            for (int kk = 0; kk < d; ++kk)
                V[ij * d + kk] += simpson * (eval_pl(x, w1, kk) - eval_pl(x, w0, kk));
        }
        Gnode = std::move(Gnext);
    }
    return V;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace testutil
