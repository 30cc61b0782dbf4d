#include "rough/dde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "rough/increments.hpp"

namespace rough {

DelaySpec::DelaySpec(std::vector<double> r) : delays(std::move(r)) {
    if (delays.empty()) throw ConfigError("DelaySpec: need at least one delay");
    double prev = 0.0;
    for (double v : delays) {
        if (v <= prev) throw ConfigError("DelaySpec: delays must be strictly increasing and positive");
        prev = v;
    }
}

DoublyDelayedCoefficients t_sigma_coeffs(const DelayVectorField& sigma, const DelayHistory& hist) {
    int n = sigma.n, d = sigma.d, q = sigma.q;
    if (static_cast<int>(hist.w.size()) != q + 1)
        throw DimensionMismatch("t_sigma_coeffs: history must carry q+1 slots");
    int in = (q + 1) * n;
    int out = n * d;
    std::vector<double> w(in);
    for (int ip = 0; ip <= q; ++ip) {
        if (static_cast<int>(hist.w[ip].size()) != n)
            throw DimensionMismatch("t_sigma_coeffs: history slot dimension mismatch");
        std::copy(hist.w[ip].begin(), hist.w[ip].end(), w.begin() + ip * n);
    }

    DoublyDelayedCoefficients C;
    C.n = n;
    C.d = d;
    C.q = q;
    C.m.resize(out);
    std::vector<double> J(static_cast<size_t>(out) * in);
    std::vector<double> H(static_cast<size_t>(out) * in * in);
    sigma.map.eval(w.data(), C.m.data());
    sigma.map.jac(w.data(), J.data());
    sigma.map.hess(w.data(), H.data());
    auto dJ = [&](int a, int i, int ip, int b) {
        return J[(static_cast<size_t>(a) * d + i) * in + ip * n + b];
    };
    auto dH = [&](int a, int i, int ip, int b1, int jp, int b2) {
        return H[((static_cast<size_t>(a) * d + i) * in + ip * n + b1) * in + jp * n + b2];
    };

    // Solution-level coefficient at the shifted time t - r_{i'}; slot 0 is the
    // current time, where the self-consistent value is m itself.
    auto z1_at = [&](int ip) -> const std::vector<double>& {
        return ip == 0 ? C.m : hist.zeta1[ip];
    };

    size_t ndd = static_cast<size_t>(n) * d * d;
    size_t nddd = ndd * d;
    C.zeta1.assign(q + 1, std::vector<double>(ndd, 0.0));
    for (int ip = 0; ip <= q; ++ip) {
        const std::vector<double>& z1 = z1_at(ip);
        if (z1.empty()) continue;  // pure-remainder history (initial segment)
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double acc = 0.0;
                    for (int b = 0; b < n; ++b) acc += dJ(a, i, ip, b) * z1[b * d + j];
                    C.zeta1[ip][(static_cast<size_t>(a) * d + i) * d + j] = acc;
                }
    }

    if (q > 0) C.zeta2.assign(static_cast<size_t>(q) * q, std::vector<double>(nddd, 0.0));
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) {
            const std::vector<double>& z2 = hist.zeta2[ip][jp];
            if (z2.empty()) continue;
            std::vector<double>& dst = C.zeta2[(ip - 1) * q + (jp - 1)];
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < d; ++i)
                    for (size_t jk = 0; jk < static_cast<size_t>(d) * d; ++jk) {
                        double acc = 0.0;
                        for (int b = 0; b < n; ++b)
                            acc += dJ(a, i, ip, b) * z2[b * d * d + jk];
                        dst[(static_cast<size_t>(a) * d + i) * d * d + jk] = acc;
                    }
        }

    C.zeta3.assign(static_cast<size_t>(q + 1) * (q + 1), std::vector<double>(nddd, 0.0));
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp) {
            std::vector<double>& dst = C.zeta3[ip * (q + 1) + jp];
            const std::vector<double>& z1i = z1_at(ip);
            const std::vector<double>& z1j = z1_at(jp);
            if (!z1i.empty() && !z1j.empty())
                for (int a = 0; a < n; ++a)
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j)
                            for (int k = 0; k < d; ++k) {
                                double acc = 0.0;
                                for (int b1 = 0; b1 < n; ++b1)
                                    for (int b2 = 0; b2 < n; ++b2)
                                        acc += dH(a, i, ip, b1, jp, b2) * z1i[b1 * d + j] *
                                               z1j[b2 * d + k];
                                dst[((static_cast<size_t>(a) * d + i) * d + j) * d + k] = acc;
                            }
            if (ip == jp) {
                // + d^{i'} sigma . zeta^{(2,0)}(r_{i'})
                const std::vector<double>& z20 =
                    ip == 0 ? C.zeta1[0] : hist.zeta2[ip][0];
                if (!z20.empty())
                    for (int a = 0; a < n; ++a)
                        for (int i = 0; i < d; ++i)
                            for (size_t jk = 0; jk < static_cast<size_t>(d) * d; ++jk) {
                                double acc = 0.0;
                                for (int b = 0; b < n; ++b)
                                    acc += dJ(a, i, ip, b) * z20[b * d * d + jk];
                                dst[(static_cast<size_t>(a) * d + i) * d * d + jk] += acc;
                            }
            }
            if (ip == 0 && jp != 0) {
                // + d^{0} sigma . zeta^{(2,j')} at the current time
                const std::vector<double>& z2j = C.zeta1[jp];
                for (int a = 0; a < n; ++a)
                    for (int i = 0; i < d; ++i)
                        for (size_t jk = 0; jk < static_cast<size_t>(d) * d; ++jk) {
                            double acc = 0.0;
                            for (int b = 0; b < n; ++b)
                                acc += dJ(a, i, 0, b) * z2j[b * d * d + jk];
                            dst[(static_cast<size_t>(a) * d + i) * d * d + jk] += acc;
                        }
            }
        }
    return C;
}

namespace {

// Germ contraction against one set of level-2/level-3 tensors.
void contract_germ(const DoublyDelayedCoefficients& C,
                   const std::vector<const double*>& a2,   // q+1 tensors, d*d
                   const std::vector<const double*>& v2,   // q*q tensors, d^3 (may hold nulls)
                   const std::vector<const double*>& v3,   // (q+1)^2 tensors, d^3
                   const double* dx, double* out) {
    int n = C.n, d = C.d, q = C.q;
    for (int a = 0; a < n; ++a) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += C.m[a * d + i] * dx[i];
        for (int ip = 0; ip <= q; ++ip) {
            const double* t = a2[ip];
            const std::vector<double>& z = C.zeta1[ip];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    acc += z[(static_cast<size_t>(a) * d + i) * d + j] * t[j * d + i];
        }
        for (int ip = 1; ip <= q; ++ip)
            for (int jp = 1; jp <= q; ++jp) {
                const double* t = v2[(ip - 1) * q + (jp - 1)];
                const std::vector<double>& z = C.z2(ip, jp);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        for (int k = 0; k < d; ++k)
                            acc += z[((static_cast<size_t>(a) * d + i) * d + j) * d + k] *
                                   t[(static_cast<size_t>(k) * d + j) * d + i];
            }
        for (int ip = 0; ip <= q; ++ip)
            for (int jp = 0; jp <= q; ++jp) {
                const double* t = v3[ip * (q + 1) + jp];
                const std::vector<double>& z = C.z3(ip, jp);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        for (int k = 0; k < d; ++k)
                            acc += z[((static_cast<size_t>(a) * d + i) * d + j) * d + k] *
                                   t[(static_cast<size_t>(k) * d + j) * d + i];
            }
        out[a] = acc;
    }
}

const VolumeFamily& need_volume(const DelayedLift& L, int k1, int k2) {
    if (!L.has_volume(k1, k2))
        throw MissingLiftFamily("delayed germ: missing volume family (" + std::to_string(k1) +
                                ", " + std::to_string(k2) + ")");
    return L.volume_family(k1, k2);
}

}  // namespace

void dde_germ_cell(const DoublyDelayedCoefficients& C, const DelayedLift& L, int cell,
                   double* out) {
    int d = C.d, q = C.q;
    const std::vector<int>& kd = L.delay_cells();
    size_t d2 = static_cast<size_t>(d) * d, d3 = d2 * d;
    std::vector<double> dx(d);
    L.dx(cell, cell + 1, dx.data());
    std::vector<const double*> a2(q + 1), v2(static_cast<size_t>(q) * std::max(q, 1), nullptr),
        v3(static_cast<size_t>(q + 1) * (q + 1));
    for (int ip = 0; ip <= q; ++ip)
        a2[ip] = L.area_family(kd[ip]).cells.data() + static_cast<size_t>(cell) * d2;
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp)
            v2[(ip - 1) * q + (jp - 1)] =
                need_volume(L, kd[jp], kd[ip]).cells.data() + static_cast<size_t>(cell) * d3;
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp)
            v3[ip * (q + 1) + jp] = need_volume(L, kd[jp] - kd[ip], kd[ip]).cells.data() +
                                    static_cast<size_t>(cell) * d3;
    contract_germ(C, a2, v2, v3, dx.data(), out);
}

void dde_germ_span(const DoublyDelayedCoefficients& C, const DelayedLift& L, int i, int j,
                   double* out) {
    int d = C.d, q = C.q;
    const std::vector<int>& kd = L.delay_cells();
    size_t d2 = static_cast<size_t>(d) * d, d3 = d2 * d;
    std::vector<double> dx(d);
    L.dx(i, j, dx.data());
    std::vector<std::vector<double>> store;
    store.reserve(static_cast<size_t>(q + 1) + static_cast<size_t>(q) * q +
                  static_cast<size_t>(q + 1) * (q + 1));
    std::vector<const double*> a2(q + 1), v2(static_cast<size_t>(q) * std::max(q, 1), nullptr),
        v3(static_cast<size_t>(q + 1) * (q + 1));
    for (int ip = 0; ip <= q; ++ip) {
        store.emplace_back(d2);
        L.area(kd[ip], i, j, store.back().data());
        a2[ip] = store.back().data();
    }
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) {
            need_volume(L, kd[jp], kd[ip]);
            store.emplace_back(d3);
            L.volume(kd[jp], kd[ip], i, j, store.back().data());
            v2[(ip - 1) * q + (jp - 1)] = store.back().data();
        }
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp) {
            need_volume(L, kd[jp] - kd[ip], kd[ip]);
            store.emplace_back(d3);
            L.volume(kd[jp] - kd[ip], kd[ip], i, j, store.back().data());
            v3[ip * (q + 1) + jp] = store.back().data();
        }
    contract_germ(C, a2, v2, v3, dx.data(), out);
}

Path1 delayed_integrate(const std::vector<DoublyDelayedCoefficients>& coeffs,
                        const DelayedLift& lift, int first_cell) {
    if (coeffs.empty()) throw ConfigError("delayed_integrate: empty coefficient range");
    int n = coeffs.front().n;
    int span = static_cast<int>(coeffs.size());
    Path1 out(Grid(lift.grid().t(first_cell), lift.grid().h, span), n);
    std::vector<double> inc(n);
    for (int c = 0; c < span; ++c) {
        dde_germ_cell(coeffs[c], lift, first_cell + c, inc.data());
        for (int p = 0; p < n; ++p) out.at(c + 1, p) = out.at(c, p) + inc[p];
    }
    return out;
}

namespace {

struct DdeState {
    const DelayedLift* lift;
    const DelayVectorField* sigma;
    int i0;     // grid index of t = 0
    int ihist;  // grid index of -r_q
    Path1 y;    // on [-r_q, T]; y index iy <-> grid index ihist + iy
    // Coefficient history, indexed by grid point; zero-size rows before i0.
    std::vector<std::vector<double>> m_hist;                   // per point: n*d
    std::vector<std::vector<std::vector<double>>> z2_hist;     // per point: (q+1) x n*d*d
};

DoublyDelayedCoefficients coeffs_at(const DdeState& st, int c) {
    const DelayedLift& L = *st.lift;
    const DelayVectorField& sg = *st.sigma;
    int q = sg.q, n = sg.n;
    const std::vector<int>& kd = L.delay_cells();
    DelayHistory hist;
    hist.w.assign(q + 1, std::vector<double>(n));
    hist.zeta1.assign(q + 1, {});
    hist.zeta2.assign(q + 1, std::vector<std::vector<double>>(q + 1));
    for (int ip = 0; ip <= q; ++ip) {
        int cs = c - kd[ip];
        int iy = cs - st.ihist;
        if (iy < 0) throw HistoryGap("solve_dde: required history precedes -r_q");
        std::copy(st.y.row(iy), st.y.row(iy) + n, hist.w[ip].begin());
        if (ip > 0) {
            hist.zeta1[ip] = st.m_hist[cs];
            for (int jp = 0; jp <= q; ++jp) hist.zeta2[ip][jp] = st.z2_hist[cs][jp];
        }
    }
    return t_sigma_coeffs(sg, hist);
}

}  // namespace

SolveReport solve_dde(const InitialSegment& xi, const DelayVectorField& sigma,
                      const DelayedLift& lift, double kappa) {
    int n = sigma.n, q = sigma.q;
    if (lift.dim() != sigma.d) throw DimensionMismatch("solve_dde: driver dimension mismatch");
    if (lift.delay_count() != q)
        throw DimensionMismatch("solve_dde: lift delay set does not match sigma's q");
    if (xi.xi.dim != n) throw DimensionMismatch("solve_dde: initial segment dimension mismatch");
    const Grid& g = lift.grid();
    const std::vector<int>& kd = lift.delay_cells();
    int kq = kd.back();
    int i0 = g.index_of(0.0);
    int ihist = i0 - kq;
    if (ihist < 0) throw HistoryGap("solve_dde: grid does not reach back to -r_q");
    if (std::abs(xi.xi.grid.h - g.h) > 1e-12 || xi.xi.grid.n != kq ||
        std::abs(xi.xi.grid.t_end()) > 1e-9 * g.h)
        throw DimensionMismatch("solve_dde: initial segment must sample [-r_q, 0] on the grid step");

    DdeState st;
    st.lift = &lift;
    st.sigma = &sigma;
    st.i0 = i0;
    st.ihist = ihist;
    st.y = Path1(Grid(g.t(ihist), g.h, kq + (g.n - i0)), n);
    std::copy(xi.xi.values.begin(), xi.xi.values.end(), st.y.values.begin());
    st.m_hist.assign(g.points(), {});
    st.z2_hist.assign(g.points(), std::vector<std::vector<double>>(q + 1));

    SolveReport rep;
    rep.method = "step3";
    rep.steps = g.n - i0;
    std::vector<double> inc(n);
    for (int c = i0; c < g.n; ++c) {
        DoublyDelayedCoefficients C = coeffs_at(st, c);
        st.m_hist[c] = C.m;
        for (int jp = 0; jp <= q; ++jp) st.z2_hist[c][jp] = C.zeta1[jp];
        dde_germ_cell(C, lift, c, inc.data());
        int iy = c - ihist;
        for (int p = 0; p < n; ++p) {
            double v = st.y.at(iy, p) + inc[p];
            if (!std::isfinite(v)) throw NonFinite("solve_dde: state left the floating range");
            st.y.at(iy + 1, p) = v;
        }
    }

    // Coherence diagnostic over sampled triples in [0, T].
    double best = 0.0;
    double kk = 2.0 * kappa;
    int span_pts = g.n - i0;
    std::vector<double> va(n), vb(n), vc(n);
    auto probe = [&](int i, int j, int k) {
        DoublyDelayedCoefficients Ci = coeffs_at(st, i);
        DoublyDelayedCoefficients Cj = coeffs_at(st, j);
        dde_germ_span(Ci, lift, i, k, va.data());
        dde_germ_span(Ci, lift, i, j, vb.data());
        dde_germ_span(Cj, lift, j, k, vc.data());
        double n2 = 0.0;
        for (int p = 0; p < n; ++p) {
            double v = va[p] - vb[p] - vc[p];
            n2 += v * v;
        }
        double w = std::pow(g.h * (j - i), kk) * std::pow(g.h * (k - j), kk);
        best = std::max(best, std::sqrt(n2) / w);
    };
    if (span_pts >= 2) {
        if (span_pts <= 20) {
            for (int i = i0; i < g.n; ++i)
                for (int j = i + 1; j < g.n; ++j)
                    for (int k = j + 1; k <= g.n; ++k) probe(i, j, k);
        } else {
            std::mt19937_64 rng(20240229);
            std::uniform_int_distribution<int> pick(i0, g.n);
            for (int trial = 0; trial < 600; ++trial) {
                int x = pick(rng), y2 = pick(rng), z = pick(rng);
                int i = std::min({x, y2, z}), k = std::max({x, y2, z});
                int j = x + y2 + z - i - k;
                if (i < j && j < k) probe(i, j, k);
            }
        }
    }
    rep.germ_residual = best;
    rep.y = std::move(st.y);
    return rep;
}

ContinuityReport dde_continuity_probe(const InitialSegment& xi1, const InitialSegment& xi2,
                                      const DelayVectorField& sigma, const DelayedLift& lift1,
                                      const DelayedLift& lift2, double gamma) {
    if (!(lift1.grid() == lift2.grid()))
        throw DimensionMismatch("dde_continuity_probe: lifts must share the grid");
    if (lift1.delay_cells() != lift2.delay_cells())
        throw DimensionMismatch("dde_continuity_probe: lifts must share the delay set");
    double kappa = 0.95 * gamma;
    SolveReport r1 = solve_dde(xi1, sigma, lift1, kappa);
    SolveReport r2 = solve_dde(xi2, sigma, lift2, kappa);
    Path1 diff = r1.y;
    for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= r2.y.values[i];

    ContinuityReport rep;
    rep.solution_distance = holder_norm2(diff, kappa);

    // Input distances: xi at 3 gamma, driver at gamma, area families at
    // 2 gamma, volume families at 3 gamma, probed over dyadic spans on the
    // window where every family is valid.
    Path1 xid = xi1.xi;
    for (size_t i = 0; i < xid.values.size(); ++i) xid.values[i] -= xi2.xi.values[i];
    double dist = holder_norm2(xid, 3 * gamma);
    double sup = 0.0;
    for (double v : xid.values) sup = std::max(sup, std::abs(v));
    dist += sup;

    const Grid& g = lift1.grid();
    int d = lift1.dim();
    const std::vector<int>& kd = lift1.delay_cells();
    int kq = kd.back();
    int lo = g.index_of(0.0), hi = g.n - kq;
    std::set<std::pair<int, int>> vol_keys;
    int q = lift1.delay_count();
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) vol_keys.insert({kd[jp], kd[ip]});
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp) vol_keys.insert({kd[jp] - kd[ip], kd[ip]});

    std::vector<int> spans;
    if (hi - lo <= 64)
        for (int k = 1; k <= hi - lo; ++k) spans.push_back(k);
    else {
        for (int k = 1; k <= hi - lo; k *= 2) spans.push_back(k);
        spans.push_back(hi - lo);
    }
    std::vector<double> u(static_cast<size_t>(d) * d * d), v(static_cast<size_t>(d) * d * d);
    auto norm_over = [&](auto&& query, int comps, double mu) {
        double best = 0.0;
        for (int span : spans) {
            double wgt = std::pow(g.h * span, mu);
            for (int i = lo; i + span <= hi; ++i) {
                query(i, i + span);
                double n2 = 0.0;
                for (int c = 0; c < comps; ++c) n2 += (u[c] - v[c]) * (u[c] - v[c]);
                best = std::max(best, std::sqrt(n2) / wgt);
            }
        }
        return best;
    };
    dist += norm_over(
        [&](int i, int j) {
            lift1.dx(i, j, u.data());
            lift2.dx(i, j, v.data());
        },
        d, gamma);
    for (int k : lift1.difference_set())
        dist += norm_over(
            [&](int i, int j) {
                lift1.area(k, i, j, u.data());
                lift2.area(k, i, j, v.data());
            },
            d * d, 2 * gamma);
    for (auto [k1, k2] : vol_keys)
        dist += norm_over(
            [&](int i, int j) {
                lift1.volume(k1, k2, i, j, u.data());
                lift2.volume(k1, k2, i, j, v.data());
            },
            d * d * d, 3 * gamma);
    rep.input_distance = dist;
    return rep;
}

}  // namespace rough
