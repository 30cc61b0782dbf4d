#include "rough/vector_field.hpp"

#include <cmath>
#include <cstring>

namespace rough {

SmoothMap SmoothMap::with_fd(int in, int out, std::function<void(const double*, double*)> f) {
    SmoothMap m;
    m.in_dim = in;
    m.out_dim = out;
    m.eval = f;
    m.finite_difference = true;
    const double step = 1e-5;
    m.jac = [in, out, f, step](const double* y, double* J) {
        std::vector<double> yp(y, y + in), fp(out), fm(out);
        for (int i = 0; i < in; ++i) {
            yp[i] = y[i] + step;
            f(yp.data(), fp.data());
            yp[i] = y[i] - step;
            f(yp.data(), fm.data());
            yp[i] = y[i];
            for (int o = 0; o < out; ++o) J[o * in + i] = (fp[o] - fm[o]) / (2 * step);
        }
    };
    m.hess = [in, out, f, step](const double* y, double* H) {
        std::vector<double> yp(y, y + in), fpp(out), fpm(out), fmp(out), fmm(out);
        for (int i = 0; i < in; ++i)
            for (int j = 0; j <= i; ++j) {
                yp[i] += step;
                yp[j] += step;
                f(yp.data(), fpp.data());
                yp[j] -= 2 * step;
                f(yp.data(), fpm.data());
                yp[i] -= 2 * step;
                f(yp.data(), fmm.data());
                yp[j] += 2 * step;
                f(yp.data(), fmp.data());
                yp[i] = y[i];
                yp[j] = y[j];
                for (int o = 0; o < out; ++o) {
                    double v = (fpp[o] - fpm[o] - fmp[o] + fmm[o]) / (4 * step * step);
                    H[(o * in + i) * in + j] = v;
                    H[(o * in + j) * in + i] = v;
                }
            }
    };
    return m;
}

double SmoothMap::derivative_consistency(const std::vector<std::vector<double>>& probes) const {
    SmoothMap fd = with_fd(in_dim, out_dim, eval);
    double worst = 0.0;
    std::vector<double> a(out_dim * in_dim), b(out_dim * in_dim);
    std::vector<double> ha(out_dim * in_dim * in_dim), hb(out_dim * in_dim * in_dim);
    for (const auto& y : probes) {
        jac(y.data(), a.data());
        fd.jac(y.data(), b.data());
        for (size_t i = 0; i < a.size(); ++i) {
            double denom = std::max(1.0, std::abs(b[i]));
            worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
        }
        hess(y.data(), ha.data());
        fd.hess(y.data(), hb.data());
        for (size_t i = 0; i < ha.size(); ++i) {
            double denom = std::max(1.0, std::abs(hb[i]));
            worst = std::max(worst, std::abs(ha[i] - hb[i]) / denom);
        }
    }
    return worst;
}

VectorField::VectorField(int l_, int d_, SmoothMap m) : l(l_), d(d_), map(std::move(m)) {
    if (map.in_dim != l || map.out_dim != l * d)
        throw DimensionMismatch("VectorField: map shape does not match (l, d)");
}

DelayVectorField::DelayVectorField(int n_, int d_, int q_, SmoothMap m)
    : n(n_), d(d_), q(q_), map(std::move(m)) {
    if (map.in_dim != (q + 1) * n || map.out_dim != n * d)
        throw DimensionMismatch("DelayVectorField: map shape does not match (n, d, q)");
}

namespace {

SmoothMap analytic(int in, int out, std::function<void(const double*, double*)> f,
                   std::function<void(const double*, double*)> j,
                   std::function<void(const double*, double*)> h) {
    SmoothMap m;
    m.in_dim = in;
    m.out_dim = out;
    m.eval = std::move(f);
    m.jac = std::move(j);
    m.hess = std::move(h);
    return m;
}

double param(const std::vector<double>& p, size_t i, double def) {
    return i < p.size() ? p[i] : def;
}

}  // namespace

VectorField make_field(const std::string& name, int l, int d, const std::vector<double>& params) {
    int out = l * d;
    int in = l;
    if (name == "zero") {
        return VectorField(l, d,
                           analytic(
                               in, out, [out](const double*, double* o) { std::fill(o, o + out, 0.0); },
                               [in, out](const double*, double* o) { std::fill(o, o + out * in, 0.0); },
                               [in, out](const double*, double* o) {
                                   std::fill(o, o + out * in * in, 0.0);
                               }));
    }
    if (name == "constant") {
        // sigma^{ij} = params[i*d + j] (cycled; default 1)
        std::vector<double> c(out);
        for (int i = 0; i < out; ++i) c[i] = params.empty() ? 1.0 : params[i % params.size()];
        return VectorField(l, d,
                           analytic(
                               in, out,
                               [c, out](const double*, double* o) {
                                   std::copy(c.begin(), c.end(), o);
                               },
                               [in, out](const double*, double* o) { std::fill(o, o + out * in, 0.0); },
                               [in, out](const double*, double* o) {
                                   std::fill(o, o + out * in * in, 0.0);
                               }));
    }
    if (name == "linear") {
        // sigma^{ij}(y) = c * y^i for every driver column j
        double c = param(params, 0, 1.0);
        return VectorField(
            l, d,
            analytic(
                in, out,
                [l, d, c](const double* y, double* o) {
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) o[i * d + j] = c * y[i];
                },
                [l, d, c, in](const double* , double* J) {
                    std::fill(J, J + l * d * in, 0.0);
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) J[(i * d + j) * in + i] = c;
                },
                [l, d, in](const double*, double* H) { std::fill(H, H + l * d * in * in, 0.0); }));
    }
    if (name == "rotation") {
        // l = 2: sigma(y) = c * J y per driver column, J the quarter turn
        if (l != 2) throw ConfigError("rotation field requires l = 2");
        double c = param(params, 0, 1.0);
        return VectorField(
            l, d,
            analytic(
                in, out,
                [d, c](const double* y, double* o) {
                    for (int j = 0; j < d; ++j) {
                        o[0 * d + j] = -c * y[1];
                        o[1 * d + j] = c * y[0];
                    }
                },
                [d, c, in, out](const double*, double* J) {
                    std::fill(J, J + out * in, 0.0);
                    for (int j = 0; j < d; ++j) {
                        J[(0 * d + j) * in + 1] = -c;
                        J[(1 * d + j) * in + 0] = c;
                    }
                },
                [in, out](const double*, double* H) { std::fill(H, H + out * in * in, 0.0); }));
    }
    if (name == "polynomial") {
        // sigma^{ij}(y) = a + b y^i + c (y^i)^2
        double a = param(params, 0, 0.0), b = param(params, 1, 1.0), c = param(params, 2, 0.0);
        return VectorField(
            l, d,
            analytic(
                in, out,
                [l, d, a, b, c](const double* y, double* o) {
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) o[i * d + j] = a + b * y[i] + c * y[i] * y[i];
                },
                [l, d, b, c, in](const double* y, double* J) {
                    std::fill(J, J + l * d * in, 0.0);
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) J[(i * d + j) * in + i] = b + 2 * c * y[i];
                },
                [l, d, c, in](const double*, double* H) {
                    std::fill(H, H + l * d * in * in, 0.0);
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) H[((i * d + j) * in + i) * in + i] = 2 * c;
                }));
    }
    if (name == "sine") {
        // sigma^{ij}(y) = a sin(y^i) + b
        double a = param(params, 0, 1.0), b = param(params, 1, 0.0);
        return VectorField(
            l, d,
            analytic(
                in, out,
                [l, d, a, b](const double* y, double* o) {
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) o[i * d + j] = a * std::sin(y[i]) + b;
                },
                [l, d, a, in](const double* y, double* J) {
                    std::fill(J, J + l * d * in, 0.0);
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j) J[(i * d + j) * in + i] = a * std::cos(y[i]);
                },
                [l, d, a, in](const double* y, double* H) {
                    std::fill(H, H + l * d * in * in, 0.0);
                    for (int i = 0; i < l; ++i)
                        for (int j = 0; j < d; ++j)
                            H[((i * d + j) * in + i) * in + i] = -a * std::sin(y[i]);
                }));
    }
    throw ConfigError("unknown vector field: " + name);
}

DelayVectorField make_delay_field(const std::string& name, int n, int d, int q,
                                  const std::vector<double>& params) {
    int in = (q + 1) * n;
    int out = n * d;
    if (name == "delay-linear") {
        // sigma^{ij}(w) = a w_0^i + b w_1^i (first delayed slot)
        if (q < 1) throw ConfigError("delay-linear requires q >= 1");
        double a = param(params, 0, 0.0), b = param(params, 1, 1.0);
        return DelayVectorField(
            n, d, q,
            analytic(
                in, out,
                [n, d, a, b](const double* w, double* o) {
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < d; ++j) o[i * d + j] = a * w[i] + b * w[n + i];
                },
                [n, d, a, b, in](const double*, double* J) {
                    std::fill(J, J + n * d * in, 0.0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < d; ++j) {
                            J[(i * d + j) * in + i] = a;
                            J[(i * d + j) * in + n + i] = b;
                        }
                },
                [n, d, in](const double*, double* H) { std::fill(H, H + n * d * in * in, 0.0); }));
    }
    if (name == "delay-feedback") {
        // sigma^{ij}(w) = a sin(w_1^i) + b w_0^i
        if (q < 1) throw ConfigError("delay-feedback requires q >= 1");
        double a = param(params, 0, 1.0), b = param(params, 1, 0.0);
        return DelayVectorField(
            n, d, q,
            analytic(
                in, out,
                [n, d, a, b](const double* w, double* o) {
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < d; ++j) o[i * d + j] = a * std::sin(w[n + i]) + b * w[i];
                },
                [n, d, a, b, in](const double* w, double* J) {
                    std::fill(J, J + n * d * in, 0.0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < d; ++j) {
                            J[(i * d + j) * in + i] = b;
                            J[(i * d + j) * in + n + i] = a * std::cos(w[n + i]);
                        }
                },
                [n, d, a, in](const double* w, double* H) {
                    std::fill(H, H + n * d * in * in, 0.0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < d; ++j)
                            H[((i * d + j) * in + n + i) * in + n + i] = -a * std::sin(w[n + i]);
                }));
    }
    // fall back to the diffusion catalog acting on the current state only
    VectorField f = make_field(name, n, d, params);
    SmoothMap inner = f.map;
    return DelayVectorField(
        n, d, q,
        analytic(
            in, out, [inner](const double* w, double* o) { inner.eval(w, o); },
            [inner, n, in, out](const double* w, double* J) {
                std::vector<double> j0(static_cast<size_t>(out) * n);
                inner.jac(w, j0.data());
                std::fill(J, J + static_cast<size_t>(out) * in, 0.0);
                for (int o = 0; o < out; ++o)
                    for (int i = 0; i < n; ++i) J[o * in + i] = j0[o * n + i];
            },
            [inner, n, in, out](const double* w, double* H) {
                std::vector<double> h0(static_cast<size_t>(out) * n * n);
                inner.hess(w, h0.data());
                std::fill(H, H + static_cast<size_t>(out) * in * in, 0.0);
                for (int o = 0; o < out; ++o)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            H[(o * in + i) * in + j] = h0[(o * n + i) * n + j];
            }));
}

}  // namespace rough
