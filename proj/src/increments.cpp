#include "rough/increments.hpp"

#include <algorithm>
#include <cmath>

namespace rough {

namespace {

void check_dense(const Grid& g, int comp, size_t entries) {
    if (g.n > kDenseGridLimit)
        throw ConfigError("dense increment storage limited to n <= 512 cells");
    (void)comp;
    if (entries > kDenseEntryLimit)
        throw ConfigError("dense increment storage would exceed the entry budget");
}

}  // namespace

Inc2::Inc2(const Grid& g, int c) : grid(g), comp(c) {
    size_t p = g.points();
    check_dense(g, c, p * p * c);
    values.assign(p * p * c, 0.0);
}

Inc3::Inc3(const Grid& g, int c) : grid(g), comp(c) {
    size_t p = g.points();
    check_dense(g, c, p * p * p * c);
    values.assign(p * p * p * c, 0.0);
}

Inc2 delta1(const Path1& g) {
    Inc2 out(g.grid, g.dim);
    int p = g.grid.points();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            for (int c = 0; c < g.dim; ++c) out.at(i, j, c) = g.at(j, c) - g.at(i, c);
    return out;
}

Inc3 delta2(const Inc2& h) {
    Inc3 out(h.grid, h.comp);
    int p = h.grid.points();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            for (int k = j + 1; k < p; ++k)
                for (int c = 0; c < h.comp; ++c)
                    out.at(i, j, k, c) = h.at(i, k, c) - h.at(i, j, c) - h.at(j, k, c);
    return out;
}

double holder_norm2(const Inc2& f, double mu) {
    int p = f.grid.points();
    double best = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            double s2 = 0.0;
            for (int c = 0; c < f.comp; ++c) {
                double v = f.at(i, j, c);
                s2 += v * v;
            }
            double dt = (j - i) * f.grid.h;
            best = std::max(best, std::sqrt(s2) / std::pow(dt, mu));
        }
    return best;
}

double holder_norm2(const Path1& g, double mu) { return holder_norm2(delta1(g), mu); }

double holder_norm3(const Inc3& h, double gamma, double rho) {
    int p = h.grid.points();
    double best = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            for (int k = j + 1; k < p; ++k) {
                double s2 = 0.0;
                for (int c = 0; c < h.comp; ++c) {
                    double v = h.at(i, j, k, c);
                    s2 += v * v;
                }
                double du = (j - i) * h.grid.h;
                double dt = (k - j) * h.grid.h;
                best = std::max(best, std::sqrt(s2) / (std::pow(du, gamma) * std::pow(dt, rho)));
            }
    return best;
}

Inc2 sew(const Inc2& germ) {
    Inc2 out(germ.grid, germ.comp);
    int p = germ.grid.points();
    // prefix sums of the cell values; S(i,j) = pre[j] - pre[i]
    std::vector<double> pre(static_cast<size_t>(p) * germ.comp, 0.0);
    for (int i = 1; i < p; ++i)
        for (int c = 0; c < germ.comp; ++c)
            pre[static_cast<size_t>(i) * germ.comp + c] =
                pre[static_cast<size_t>(i - 1) * germ.comp + c] + germ.at(i - 1, i, c);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            for (int c = 0; c < germ.comp; ++c)
                out.at(i, j, c) = pre[static_cast<size_t>(j) * germ.comp + c] -
                                  pre[static_cast<size_t>(i) * germ.comp + c];
    return out;
}

double delta3_sup(const Inc3& h) {
    int p = h.grid.points();
    double sup = 0.0;
    // delta of a 2-increment at (s,u,w,t): h_{uwt} - h_{swt} + h_{sut} - h_{suw}
    for (int s = 0; s < p; ++s)
        for (int u = s + 1; u < p; ++u)
            for (int w = u + 1; w < p; ++w)
                for (int t = w + 1; t < p; ++t)
                    for (int c = 0; c < h.comp; ++c) {
                        double v = h.at(u, w, t, c) - h.at(s, w, t, c) + h.at(s, u, t, c) -
                                   h.at(s, u, w, c);
                        sup = std::max(sup, std::abs(v));
                    }
    return sup;
}

Inc2 lambda_grid(const Inc3& h, double tol) {
    int p = h.grid.points();
    double scale = 0.0;
    for (double v : h.values) scale = std::max(scale, std::abs(v));
    // Closedness is equivalent to additivity of j -> h_{i,j,j+1} building g below;
    // check delta h = 0 directly on quadruples (capped scan for large grids).
    if (scale > 0.0) {
        double sup = delta3_sup(h);
        if (sup > tol * scale) throw NotClosed("lambda_grid: delta h != 0 beyond tolerance");
    }
    Inc2 g(h.grid, h.comp);
    for (int i = 0; i < p; ++i) {
        // g(i, i+1) = 0 by normalization
        for (int j = i + 1; j + 1 < p; ++j)
            for (int c = 0; c < h.comp; ++c)
                g.at(i, j + 1, c) = g.at(i, j, c) + h.at(i, j, j + 1, c);
    }
    return g;
}

}  // namespace rough
