#include "rough/controlled.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rough {

namespace {

void check_shapes(const ControlledPath& z) {
    int d = z.d();
    if (z.zeta1.dim != z.z.dim * d || z.zeta2.dim != z.z.dim * d * d)
        throw DimensionMismatch("controlled path: coefficient dims do not match l, d");
    if (!(z.zeta1.grid == z.z.grid) || !(z.zeta2.grid == z.z.grid) ||
        !(z.z.grid == z.lift->grid()))
        throw DimensionMismatch("controlled path: coefficient grids differ from driver grid");
}

double sup_abs(const Path1& p) {
    double m = 0.0;
    for (double v : p.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

ControlledPath self_controlled(const RoughLift3& lift, double kappa) {
    int d = lift.dim();
    ControlledPath z;
    z.lift = &lift;
    z.kappa = kappa;
    z.z = lift.path();
    z.zeta1 = Path1(lift.grid(), d * d);
    z.zeta2 = Path1(lift.grid(), d * d * d);
    for (int i = 0; i <= lift.grid().n; ++i)
        for (int c = 0; c < d; ++c) z.zeta1.at(i, c * d + c) = 1.0;
    return z;
}

std::pair<Inc2, Inc2> remainders(const ControlledPath& z) {
    check_shapes(z);
    int l = z.l(), d = z.d();
    const Grid& g = z.z.grid;
    Inc2 r(g, l);
    Inc2 rho(g, l * d);
    std::vector<double> dx(d), a2(d * d);
    for (int i = 0; i <= g.n; ++i) {
        const double* z1 = z.zeta1.row(i);
        const double* z2 = z.zeta2.row(i);
        for (int j = i + 1; j <= g.n; ++j) {
            z.lift->dx(i, j, dx.data());
            z.lift->area(i, j, a2.data());
            for (int p = 0; p < l; ++p) {
                double acc = z.z.at(j, p) - z.z.at(i, p);
                for (int jj = 0; jj < d; ++jj) {
                    acc -= z1[p * d + jj] * dx[jj];
                    for (int kk = 0; kk < d; ++kk)
                        acc -= z2[(p * d + jj) * d + kk] * a2[kk * d + jj];
                }
                r.at(i, j, p) = acc;
            }
            for (int p = 0; p < l; ++p)
                for (int jj = 0; jj < d; ++jj) {
                    double acc = z.zeta1.at(j, p * d + jj) - z1[p * d + jj];
                    for (int kk = 0; kk < d; ++kk) acc -= z2[(p * d + jj) * d + kk] * dx[kk];
                    rho.at(i, j, p * d + jj) = acc;
                }
        }
    }
    return {std::move(r), std::move(rho)};
}

double controlled_norm(const ControlledPath& z) {
    check_shapes(z);
    auto [r, rho] = remainders(z);
    double k = z.kappa;
    return holder_norm2(z.z, k) + sup_abs(z.zeta1) + holder_norm2(z.zeta1, k) +
           sup_abs(z.zeta2) + holder_norm2(z.zeta2, k) + holder_norm2(rho, 2 * k) +
           holder_norm2(r, 3 * k);
}

ControlledPath compose(const SmoothMap& phi, const ControlledPath& z) {
    check_shapes(z);
    int l = z.l(), d = z.d(), m = phi.out_dim;
    if (phi.in_dim != l) throw DimensionMismatch("compose: map input dim != controlled dim");
    const Grid& g = z.z.grid;
    ControlledPath out;
    out.lift = z.lift;
    out.kappa = z.kappa;
    out.z = Path1(g, m);
    out.zeta1 = Path1(g, m * d);
    out.zeta2 = Path1(g, m * d * d);
    std::vector<double> J(static_cast<size_t>(m) * l), H(static_cast<size_t>(m) * l * l);
    for (int t = 0; t <= g.n; ++t) {
        const double* y = z.z.row(t);
        phi.eval(y, out.z.row(t));
        phi.jac(y, J.data());
        phi.hess(y, H.data());
        const double* z1 = z.zeta1.row(t);
        const double* z2 = z.zeta2.row(t);
        double* o1 = out.zeta1.row(t);
        double* o2 = out.zeta2.row(t);
        for (int o = 0; o < m; ++o)
            for (int jj = 0; jj < d; ++jj) {
                double acc = 0.0;
                for (int i = 0; i < l; ++i) acc += J[o * l + i] * z1[i * d + jj];
                o1[o * d + jj] = acc;
            }
        for (int o = 0; o < m; ++o)
            for (int jj = 0; jj < d; ++jj)
                for (int kk = 0; kk < d; ++kk) {
                    double acc = 0.0;
                    for (int i = 0; i < l; ++i)
                        acc += J[o * l + i] * z2[(i * d + jj) * d + kk];
                    for (int i1 = 0; i1 < l; ++i1)
                        for (int i2 = 0; i2 < l; ++i2)
                            acc += H[(o * l + i1) * l + i2] * z1[i1 * d + jj] * z1[i2 * d + kk];
                    o2[(o * d + jj) * d + kk] = acc;
                }
    }
    return out;
}

std::vector<double> germ_value(const ControlledPath& m, int i, int j) {
    int d = m.d();
    if (m.z.dim % d != 0)
        throw DimensionMismatch("germ: integrand dim is not a multiple of the driver dim");
    int l = m.z.dim / d;
    std::vector<double> dx(d), a2(d * d), v3(d * d * d), out(l, 0.0);
    m.lift->dx(i, j, dx.data());
    m.lift->area(i, j, a2.data());
    m.lift->volume(i, j, v3.data());
    const double* mm = m.z.row(i);
    const double* u1 = m.zeta1.row(i);
    const double* u2 = m.zeta2.row(i);
    for (int p = 0; p < l; ++p) {
        double acc = 0.0;
        for (int jj = 0; jj < d; ++jj) {
            acc += mm[p * d + jj] * dx[jj];
            for (int kk = 0; kk < d; ++kk) {
                acc += u1[(p * d + jj) * d + kk] * a2[kk * d + jj];
                for (int k2 = 0; k2 < d; ++k2)
                    acc += u2[((p * d + jj) * d + kk) * d + k2] * v3[(k2 * d + kk) * d + jj];
            }
        }
        out[p] = acc;
    }
    return out;
}

std::vector<double> germ_riemann_sum(const ControlledPath& m, int i, int j, int stride) {
    if (stride < 1 || (j - i) % stride != 0)
        throw OutOfRange("germ_riemann_sum: stride must divide the span");
    int d = m.d();
    int l = m.z.dim / d;
    std::vector<double> sum(l, 0.0);
    for (int s = i; s < j; s += stride) {
        std::vector<double> xi = germ_value(m, s, s + stride);
        for (int p = 0; p < l; ++p) sum[p] += xi[p];
    }
    return sum;
}

IntegrateResult integrate(const ControlledPath& m) {
    check_shapes(m);
    int d = m.d();
    if (m.z.dim % d != 0)
        throw DimensionMismatch("integrate: integrand dim is not a multiple of the driver dim");
    int l = m.z.dim / d;
    const Grid& g = m.z.grid;

    IntegrateResult res;
    res.z.lift = m.lift;
    res.z.kappa = m.kappa;
    res.z.z = Path1(g, l);
    res.z.zeta1 = m.z;      // l*d components, reread as the coefficient shape
    res.z.zeta2 = m.zeta1;  // l*d*d components

    // March the germ over the finest cells; the sewing correction telescopes
    // away on the full sum, so cell-wise accumulation is the sewn integral.
    for (int c = 0; c < g.n; ++c) {
        std::vector<double> xi = germ_value(m, c, c + 1);
        for (int p = 0; p < l; ++p) {
            double v = res.z.z.at(c, p) + xi[p];
            if (!std::isfinite(v)) throw NonFinite("integrate: non-finite value during march");
            res.z.z.at(c + 1, p) = v;
        }
    }

    // Coherence diagnostic: Hoelder surrogate of delta Xi over grid triples
    // (exhaustive on small grids, seeded sample otherwise).
    double best = 0.0;
    double kk = 2.0 * m.kappa;
    auto probe = [&](int i, int j, int k) {
        std::vector<double> a = germ_value(m, i, k);
        std::vector<double> b = germ_value(m, i, j);
        std::vector<double> c = germ_value(m, j, k);
        double n2 = 0.0;
        for (int p = 0; p < l; ++p) {
            double v = a[p] - b[p] - c[p];
            n2 += v * v;
        }
        double w = std::pow(g.h * (j - i), kk) * std::pow(g.h * (k - j), kk);
        best = std::max(best, std::sqrt(n2) / w);
    };
    size_t total = static_cast<size_t>(g.n + 1) * (g.n + 1) * (g.n + 1);
    if (total <= 8000) {
        for (int i = 0; i <= g.n; ++i)
            for (int j = i + 1; j <= g.n; ++j)
                for (int k = j + 1; k <= g.n; ++k) probe(i, j, k);
    } else {
        std::mt19937_64 rng(20240811);
        std::uniform_int_distribution<int> pick(0, g.n);
        for (int trial = 0; trial < 4000; ++trial) {
            int a = pick(rng), b = pick(rng), c = pick(rng);
            int i = std::min({a, b, c}), k = std::max({a, b, c});
            int j = a + b + c - i - k;
            if (i < j && j < k) probe(i, j, k);
        }
    }
    res.germ_residual = best;
    return res;
}

}  // namespace rough
