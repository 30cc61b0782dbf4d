#include "rough/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rough {

void step3(const double* y, const VectorField& sigma, const double* dx, const double* x2,
           const double* x3, double* out) {
    int l = sigma.l, d = sigma.d;
    std::vector<double> s(static_cast<size_t>(l) * d);
    std::vector<double> J(static_cast<size_t>(l) * d * l);
    std::vector<double> H(static_cast<size_t>(l) * d * l * l);
    sigma.map.eval(y, s.data());
    sigma.map.jac(y, J.data());
    sigma.map.hess(y, H.data());

    // mu1^{ijk} = d_m s^{ij} s^{mk}
    std::vector<double> mu1(static_cast<size_t>(l) * d * d, 0.0);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double acc = 0.0;
                for (int m = 0; m < l; ++m)
                    acc += J[(static_cast<size_t>(i) * d + j) * l + m] * s[m * d + k];
                mu1[(static_cast<size_t>(i) * d + j) * d + k] = acc;
            }

    for (int i = 0; i < l; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) {
            acc += s[i * d + j] * dx[j];
            for (int k = 0; k < d; ++k)
                acc += mu1[(static_cast<size_t>(i) * d + j) * d + k] * x2[k * d + j];
        }
        // mu2^{ijk1k2} = d_m s^{ij} d_p s^{mk1} s^{pk2} + d_{mp} s^{ij} s^{mk1} s^{pk2},
        // contracted against x3^{k2 k1 j}
        for (int j = 0; j < d; ++j)
            for (int k1 = 0; k1 < d; ++k1)
                for (int k2 = 0; k2 < d; ++k2) {
                    double coef = 0.0;
                    for (int m = 0; m < l; ++m) {
                        double jij = J[(static_cast<size_t>(i) * d + j) * l + m];
                        coef += jij * mu1[(static_cast<size_t>(m) * d + k1) * d + k2];
                        for (int p = 0; p < l; ++p)
                            coef += H[((static_cast<size_t>(i) * d + j) * l + m) * l + p] *
                                    s[m * d + k1] * s[p * d + k2];
                    }
                    acc += coef * x3[(static_cast<size_t>(k2) * d + k1) * d + j];
                }
        out[i] = acc;
    }
}

namespace {

// Germ value over an arbitrary span with coefficients frozen at the left end.
void sde_germ(const double* y, const VectorField& sigma, const RoughLift3& lift, int i, int j,
              double* out) {
    int d = sigma.d;
    std::vector<double> dx(d), a2(static_cast<size_t>(d) * d), v3(static_cast<size_t>(d) * d * d);
    lift.dx(i, j, dx.data());
    lift.area(i, j, a2.data());
    lift.volume(i, j, v3.data());
    step3(y, sigma, dx.data(), a2.data(), v3.data(), out);
}

// Hoelder surrogate of delta Xi over sampled grid triples, with the solution
// values already marched.
double sde_residual(const Path1& y, const VectorField& sigma, const RoughLift3& lift,
                    double kappa) {
    const Grid& g = lift.grid();
    int l = sigma.l;
    double best = 0.0;
    double kk = 2.0 * kappa;
    std::vector<double> a(l), b(l), c(l);
    auto probe = [&](int i, int j, int k) {
        sde_germ(y.row(i), sigma, lift, i, k, a.data());
        sde_germ(y.row(i), sigma, lift, i, j, b.data());
        sde_germ(y.row(j), sigma, lift, j, k, c.data());
        double n2 = 0.0;
        for (int p = 0; p < l; ++p) {
            double v = a[p] - b[p] - c[p];
            n2 += v * v;
        }
        double w = std::pow(g.h * (j - i), kk) * std::pow(g.h * (k - j), kk);
        best = std::max(best, std::sqrt(n2) / w);
    };
    if (g.n <= 24) {
        for (int i = 0; i <= g.n; ++i)
            for (int j = i + 1; j <= g.n; ++j)
                for (int k = j + 1; k <= g.n; ++k) probe(i, j, k);
    } else {
        std::mt19937_64 rng(20240517);
        std::uniform_int_distribution<int> pick(0, g.n);
        for (int trial = 0; trial < 2000; ++trial) {
            int x = pick(rng), y2 = pick(rng), z = pick(rng);
            int i = std::min({x, y2, z}), k = std::max({x, y2, z});
            int j = x + y2 + z - i - k;
            if (i < j && j < k) probe(i, j, k);
        }
    }
    return best;
}

Path1 subpath(const Path1& x, int i0, int w) {
    Path1 out(Grid(x.grid.t(i0), x.grid.h, w), x.dim);
    std::copy(x.row(i0), x.row(i0) + static_cast<size_t>(w + 1) * x.dim, out.row(0));
    return out;
}

}  // namespace

SolveReport solve_sde(const std::vector<double>& a, const VectorField& sigma,
                      const RoughLift3& lift, double kappa) {
    int l = sigma.l, d = sigma.d;
    if (static_cast<int>(a.size()) != l || lift.dim() != d)
        throw DimensionMismatch("solve_sde: state or driver dimension mismatch");
    const Grid& g = lift.grid();
    SolveReport rep;
    rep.method = "step3";
    rep.steps = g.n;
    rep.y = Path1(g, l);
    std::copy(a.begin(), a.end(), rep.y.row(0));
    std::vector<double> inc(l);
    for (int c = 0; c < g.n; ++c) {
        std::vector<double> dx(d);
        lift.dx(c, c + 1, dx.data());
        step3(rep.y.row(c), sigma, dx.data(), lift.area_cell(c), lift.volume_cell(c), inc.data());
        for (int p = 0; p < l; ++p) {
            double v = rep.y.at(c, p) + inc[p];
            if (!std::isfinite(v)) throw NonFinite("solve_sde: state left the floating range");
            rep.y.at(c + 1, p) = v;
        }
    }
    rep.germ_residual = sde_residual(rep.y, sigma, lift, kappa);
    return rep;
}

SolveReport picard_solve(const std::vector<double>& a, const VectorField& sigma,
                         const RoughLift3& lift, double tol, int max_iter, double kappa) {
    int l = sigma.l, d = sigma.d;
    if (static_cast<int>(a.size()) != l || lift.dim() != d)
        throw DimensionMismatch("picard_solve: state or driver dimension mismatch");
    if (tol <= 0) throw ConfigError("picard_solve: tol must be positive");
    const Grid& g = lift.grid();

    SolveReport rep;
    rep.method = "picard";
    rep.steps = g.n;
    rep.picard_iters = 0;
    rep.y = Path1(g, l);
    std::copy(a.begin(), a.end(), rep.y.row(0));

    int window = g.n;
    int pos = 0;
    std::vector<double> aw(a);
    while (pos < g.n) {
        int w = std::min(window, g.n - pos);
        Path1 xw = subpath(lift.path(), pos, w);
        RoughLift3 lw = RoughLift3::lift_linear(xw);

        // z_0 == aw, zero coefficients
        ControlledPath z;
        z.lift = &lw;
        z.kappa = kappa;
        z.z = Path1(xw.grid, l);
        z.zeta1 = Path1(xw.grid, l * d);
        z.zeta2 = Path1(xw.grid, l * d * d);
        for (int i = 0; i <= w; ++i) std::copy(aw.begin(), aw.end(), z.z.row(i));

        bool converged = false;
        double dist = 0.0;
        int growth_streak = 0;
        double prev_dist = std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_iter && !converged; ++it) {
            ControlledPath m = compose(sigma.map, z);
            IntegrateResult res = integrate(m);
            ControlledPath znew = std::move(res.z);
            for (int i = 0; i <= w; ++i)
                for (int p = 0; p < l; ++p) znew.z.at(i, p) += aw[p];

            dist = 0.0;
            for (size_t q = 0; q < znew.z.values.size(); ++q)
                dist = std::max(dist, std::abs(znew.z.values[q] - z.z.values[q]));
            ++rep.picard_iters;
            z = std::move(znew);
            rep.germ_residual = std::max(rep.germ_residual, res.germ_residual);

            // Divergence signal: the update size grows over three consecutive
            // iterations (a contracting map shrinks it geometrically).
            if (!std::isfinite(dist) || dist > prev_dist) {
                ++growth_streak;
            } else {
                growth_streak = 0;
            }
            prev_dist = dist;
            if (!std::isfinite(dist) || growth_streak >= 3) break;
            if (dist < tol) converged = true;
        }

        if (!converged) {
            if (growth_streak >= 3 || !std::isfinite(dist)) {
                if (window <= 4)
                    throw NoConvergence("picard_solve: divergence at the minimal window",
                                        rep.picard_iters, dist);
                window = std::max(4, window / 2);
                continue;  // retry the same position with a shorter window
            }
            throw NoConvergence("picard_solve: iteration budget exhausted", rep.picard_iters,
                                dist);
        }

        for (int i = 1; i <= w; ++i)
            for (int p = 0; p < l; ++p) {
                double v = z.z.at(i, p);
                if (!std::isfinite(v)) throw NonFinite("picard_solve: non-finite window solution");
                rep.y.at(pos + i, p) = v;
            }
        for (int p = 0; p < l; ++p) aw[p] = z.z.at(w, p);
        pos += w;
    }
    return rep;
}

namespace {

// Discrete Hoelder distance of two lifts over dyadic spans (all spans when the
// grid is small): path at gamma, areas at 2 gamma, volumes at 3 gamma.
double lift_distance(const RoughLift3& l1, const RoughLift3& l2, double gamma) {
    const Grid& g = l1.grid();
    int d = l1.dim();
    double npath = 0.0, narea = 0.0, nvol = 0.0;
    std::vector<double> u(static_cast<size_t>(d) * d * d), v(static_cast<size_t>(d) * d * d);
    auto spans = [&] {
        std::vector<int> s;
        if (g.n <= 128) {
            for (int k = 1; k <= g.n; ++k) s.push_back(k);
        } else {
            for (int k = 1; k <= g.n; k *= 2) s.push_back(k);
            s.push_back(g.n);
        }
        return s;
    }();
    for (int span : spans) {
        double w1 = std::pow(g.h * span, gamma);
        double w2 = std::pow(g.h * span, 2 * gamma);
        double w3 = std::pow(g.h * span, 3 * gamma);
        for (int i = 0; i + span <= g.n; ++i) {
            int j = i + span;
            double n2 = 0.0;
            l1.dx(i, j, u.data());
            l2.dx(i, j, v.data());
            for (int c = 0; c < d; ++c) n2 += (u[c] - v[c]) * (u[c] - v[c]);
            npath = std::max(npath, std::sqrt(n2) / w1);
            n2 = 0.0;
            l1.area(i, j, u.data());
            l2.area(i, j, v.data());
            for (int c = 0; c < d * d; ++c) n2 += (u[c] - v[c]) * (u[c] - v[c]);
            narea = std::max(narea, std::sqrt(n2) / w2);
            n2 = 0.0;
            l1.volume(i, j, u.data());
            l2.volume(i, j, v.data());
            for (int c = 0; c < d * d * d; ++c) n2 += (u[c] - v[c]) * (u[c] - v[c]);
            nvol = std::max(nvol, std::sqrt(n2) / w3);
        }
    }
    return npath + narea + nvol;
}

}  // namespace

ContinuityReport continuity_probe(const std::vector<double>& a, const VectorField& sigma,
                                  const RoughLift3& lift1, const RoughLift3& lift2,
                                  double gamma) {
    if (!(lift1.grid() == lift2.grid()))
        throw DimensionMismatch("continuity_probe: lifts must share the grid");
    double kappa = 0.95 * gamma;
    SolveReport r1 = solve_sde(a, sigma, lift1, kappa);
    SolveReport r2 = solve_sde(a, sigma, lift2, kappa);
    Path1 diff = r1.y;
    for (size_t q = 0; q < diff.values.size(); ++q) diff.values[q] -= r2.y.values[q];
    ContinuityReport rep;
    rep.solution_distance = holder_norm2(diff, kappa);
    rep.input_distance = lift_distance(lift1, lift2, gamma);
    return rep;
}

}  // namespace rough
