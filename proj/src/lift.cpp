#include "rough/lift.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "rough/errors.hpp"

namespace rough {

void chen2(double* a_su, const double* a_ut, const double* dx_su, const double* dx_ut, int d) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a_su[i * d + j] += a_ut[i * d + j] + dx_su[i] * dx_ut[j];
}

void chen3(double* v_su, const double* v_ut, const double* a_su, const double* a_ut,
           const double* dx_su, const double* dx_ut, int d) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                v_su[(i * d + j) * d + k] += v_ut[(i * d + j) * d + k] +
                                             a_su[i * d + j] * dx_ut[k] +
                                             dx_su[i] * a_ut[j * d + k];
}

RoughLift3 RoughLift3::lift_linear(const Path1& x) {
    if (x.dim < 1) throw DimensionMismatch("lift_linear: dim must be >= 1");
    RoughLift3 L;
    L.x_ = x;
    int d = x.dim, n = x.grid.n;
    L.d2_ = d * d;
    L.d3_ = d * d * d;
    L.area_cells_.assign(static_cast<size_t>(n) * L.d2_, 0.0);
    L.volume_cells_.assign(static_cast<size_t>(n) * L.d3_, 0.0);
    for (int c = 0; c < n; ++c) {
        const double* a = x.row(c);
        const double* b = x.row(c + 1);
        double* A = L.area_cells_.data() + static_cast<size_t>(c) * L.d2_;
        double* V = L.volume_cells_.data() + static_cast<size_t>(c) * L.d3_;
        for (int i = 0; i < d; ++i) {
            double di = b[i] - a[i];
            for (int j = 0; j < d; ++j) {
                double dj = b[j] - a[j];
                A[i * d + j] = 0.5 * di * dj;
                for (int k = 0; k < d; ++k) V[(i * d + j) * d + k] = di * dj * (b[k] - a[k]) / 6.0;
            }
        }
    }
    return L;
}

void RoughLift3::dx(int i, int j, double* out) const {
    for (int c = 0; c < x_.dim; ++c) out[c] = x_.at(j, c) - x_.at(i, c);
}

void RoughLift3::area(int i, int j, double* out) const {
    int d = x_.dim;
    std::fill(out, out + d2_, 0.0);
    if (j <= i) return;
    std::vector<double> dxa(d, 0.0), dxc(d);
    std::memcpy(out, area_cell(i), sizeof(double) * d2_);
    dx(i, i + 1, dxa.data());
    for (int c = i + 1; c < j; ++c) {
        dx(c, c + 1, dxc.data());
        chen2(out, area_cell(c), dxa.data(), dxc.data(), d);
        for (int m = 0; m < d; ++m) dxa[m] += dxc[m];
    }
}

void RoughLift3::volume(int i, int j, double* out) const {
    int d = x_.dim;
    std::fill(out, out + d3_, 0.0);
    if (j <= i) return;
    std::vector<double> a(d2_), dxa(d), dxc(d);
    std::memcpy(out, volume_cell(i), sizeof(double) * d3_);
    std::memcpy(a.data(), area_cell(i), sizeof(double) * d2_);
    dx(i, i + 1, dxa.data());
    for (int c = i + 1; c < j; ++c) {
        dx(c, c + 1, dxc.data());
        chen3(out, volume_cell(c), a.data(), area_cell(c), dxa.data(), dxc.data(), d);
        chen2(a.data(), area_cell(c), dxa.data(), dxc.data(), d);
        for (int m = 0; m < d; ++m) dxa[m] += dxc[m];
    }
}

std::vector<double> RoughLift3::dx(int i, int j) const {
    std::vector<double> out(x_.dim);
    dx(i, j, out.data());
    return out;
}
std::vector<double> RoughLift3::area(int i, int j) const {
    std::vector<double> out(d2_);
    area(i, j, out.data());
    return out;
}
std::vector<double> RoughLift3::volume(int i, int j) const {
    std::vector<double> out(d3_);
    volume(i, j, out.data());
    return out;
}

AreaFamily delayed_area(const Path1& x, int k) {
    int d = x.dim, n = x.grid.n;
    AreaFamily f;
    f.k = k;
    f.c_lo = std::max(0, k);
    f.c_hi = std::min(n - 1, n - 1 + k);
    f.cells.assign(static_cast<size_t>(n) * d * d, 0.0);
    if (f.c_lo > f.c_hi) throw OutOfRange("delayed_area: shift leaves no valid cells");
    for (int c = f.c_lo; c <= f.c_hi; ++c) {
        const double* a0 = x.row(c - k);
        const double* a1 = x.row(c - k + 1);
        const double* b0 = x.row(c);
        const double* b1 = x.row(c + 1);
        double* A = f.cells.data() + static_cast<size_t>(c) * d * d;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A[i * d + j] = 0.5 * (a1[i] - a0[i]) * (b1[j] - b0[j]);
    }
    return f;
}

VolumeFamily delayed_volume(const Path1& x, int k1, int k2) {
    if (k2 < 0) throw InadmissiblePair("delayed_volume: v2 must be >= 0");
    if (k1 + k2 < 0) throw InadmissiblePair("delayed_volume: need v1 + v2 >= 0");
    int d = x.dim, n = x.grid.n;
    VolumeFamily f;
    f.k1 = k1;
    f.k2 = k2;
    f.c_lo = std::max({0, k2, k1 + k2});
    f.c_hi = n - 1;
    f.cells.assign(static_cast<size_t>(n) * d * d * d, 0.0);
    if (f.c_lo > f.c_hi) throw OutOfRange("delayed_volume: shifts leave no valid cells");
    for (int c = f.c_lo; c <= f.c_hi; ++c) {
        const double* p0 = x.row(c - k1 - k2);
        const double* p1 = x.row(c - k1 - k2 + 1);
        const double* q0 = x.row(c - k2);
        const double* q1 = x.row(c - k2 + 1);
        const double* r0 = x.row(c);
        const double* r1 = x.row(c + 1);
        double* V = f.cells.data() + static_cast<size_t>(c) * d * d * d;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    V[(i * d + j) * d + k] =
                        (p1[i] - p0[i]) * (q1[j] - q0[j]) * (r1[k] - r0[k]) / 6.0;
    }
    return f;
}

DelayedLift DelayedLift::build(const Path1& x, const std::vector<double>& delays) {
    DelayedLift L;
    L.x_ = x;
    int d = x.dim;
    L.d2_ = d * d;
    L.d3_ = d * d * d;
    L.kdel_.clear();
    L.kdel_.push_back(0);
    int prev = 0;
    for (double r : delays) {
        int k = x.grid.cells_of(r);
        if (k <= prev) throw ConfigError("delays must be strictly increasing and positive");
        L.kdel_.push_back(k);
        prev = k;
    }
    int q = static_cast<int>(L.kdel_.size()) - 1;
    // difference set D = { k_j - k_i }
    for (int i = 0; i <= q; ++i)
        for (int j = 0; j <= q; ++j) {
            int kv = L.kdel_[j] - L.kdel_[i];
            if (std::find(L.diff_.begin(), L.diff_.end(), kv) == L.diff_.end())
                L.diff_.push_back(kv);
        }
    std::sort(L.diff_.begin(), L.diff_.end());
    for (int kv : L.diff_) L.areas_.emplace(kv, delayed_area(x, kv));
    // volume index sets of the delay solver: (k_j', k_i') for i',j' >= 1 and
    // (k_j'' - k_i'', k_i'') for i'',j'' >= 0
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) {
            std::pair<int, int> key{L.kdel_[jp], L.kdel_[ip]};
            if (!L.volumes_.count(key)) L.volumes_.emplace(key, delayed_volume(x, key.first, key.second));
        }
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp) {
            std::pair<int, int> key{L.kdel_[jp] - L.kdel_[ip], L.kdel_[ip]};
            if (!L.volumes_.count(key)) L.volumes_.emplace(key, delayed_volume(x, key.first, key.second));
        }
    return L;
}

const AreaFamily& DelayedLift::area_family(int k) const {
    auto it = areas_.find(k);
    if (it == areas_.end())
        throw MissingLiftFamily("area family absent for v = " + std::to_string(k) + " cells");
    return it->second;
}

const VolumeFamily& DelayedLift::volume_family(int k1, int k2) const {
    auto it = volumes_.find({k1, k2});
    if (it == volumes_.end())
        throw MissingLiftFamily("volume family absent for (v1, v2) = (" + std::to_string(k1) +
                                ", " + std::to_string(k2) + ") cells");
    return it->second;
}

void DelayedLift::dx(int i, int j, double* out) const {
    for (int c = 0; c < x_.dim; ++c) out[c] = x_.at(j, c) - x_.at(i, c);
}

void DelayedLift::dx_shifted(int i, int j, int k, double* out) const {
    int p = x_.grid.points();
    if (i - k < 0 || j - k >= p) throw OutOfRange("dx_shifted: shifted index off the grid");
    for (int c = 0; c < x_.dim; ++c) out[c] = x_.at(j - k, c) - x_.at(i - k, c);
}

void DelayedLift::area(int k, int i, int j, double* out) const {
    const AreaFamily& f = area_family(k);
    int d = x_.dim;
    std::fill(out, out + d2_, 0.0);
    if (j <= i) return;
    if (i < f.c_lo || j - 1 > f.c_hi) throw OutOfRange("delayed area query outside valid window");
    std::vector<double> dxs(d, 0.0), dxc(d);
    std::memcpy(out, f.cells.data() + static_cast<size_t>(i) * d2_, sizeof(double) * d2_);
    dx_shifted(i, i + 1, k, dxs.data());
    for (int c = i + 1; c < j; ++c) {
        dx(c, c + 1, dxc.data());
        chen2(out, f.cells.data() + static_cast<size_t>(c) * d2_, dxs.data(), dxc.data(), d);
        std::vector<double> step(d);
        dx_shifted(c, c + 1, k, step.data());
        for (int m = 0; m < d; ++m) dxs[m] += step[m];
    }
}

void DelayedLift::volume(int k1, int k2, int i, int j, double* out) const {
    const VolumeFamily& f = volume_family(k1, k2);
    const AreaFamily& a1 = area_family(k1);
    const AreaFamily& a2 = area_family(k2);
    int d = x_.dim;
    std::fill(out, out + d3_, 0.0);
    if (j <= i) return;
    if (i < f.c_lo || j - 1 > f.c_hi) throw OutOfRange("delayed volume query outside valid window");
    // x2_{i,c}(v1, v2) = A(v1) on the v2-shifted span (shift identity); folded along.
    std::vector<double> a2acc(d2_, 0.0), dxa(d, 0.0), dxc(d), step(d);
    std::memcpy(out, f.cells.data() + static_cast<size_t>(i) * d3_, sizeof(double) * d3_);
    std::memcpy(a2acc.data(), a1.cells.data() + static_cast<size_t>(i - k2) * d2_,
                sizeof(double) * d2_);
    dx_shifted(i, i + 1, k1 + k2, dxa.data());
    for (int c = i + 1; c < j; ++c) {
        dx(c, c + 1, dxc.data());
        const double* vcell = f.cells.data() + static_cast<size_t>(c) * d3_;
        const double* a2cell = a2.cells.data() + static_cast<size_t>(c) * d2_;
        for (int ii = 0; ii < d; ++ii)
            for (int jj = 0; jj < d; ++jj)
                for (int kk = 0; kk < d; ++kk)
                    out[(ii * d + jj) * d + kk] += vcell[(ii * d + jj) * d + kk] +
                                                   a2acc[ii * d + jj] * dxc[kk] +
                                                   dxa[ii] * a2cell[jj * d + kk];
        const double* a1cell = a1.cells.data() + static_cast<size_t>(c - k2) * d2_;
        std::vector<double> dxq(d);
        dx_shifted(c, c + 1, k2, dxq.data());
        chen2(a2acc.data(), a1cell, dxa.data(), dxq.data(), d);
        dx_shifted(c, c + 1, k1 + k2, step.data());
        for (int m = 0; m < d; ++m) dxa[m] += step[m];
    }
}

std::vector<double> DelayedLift::area(int k, int i, int j) const {
    std::vector<double> out(d2_);
    area(k, i, j, out.data());
    return out;
}
std::vector<double> DelayedLift::volume(int k1, int k2, int i, int j) const {
    std::vector<double> out(d3_);
    volume(k1, k2, i, j, out.data());
    return out;
}

void DelayedLift::perturb_area_cell(int k, int c, double eps) {
    auto it = areas_.find(k);
    if (it == areas_.end()) throw MissingLiftFamily("perturb_area_cell: family absent");
    it->second.cells[static_cast<size_t>(c) * d2_] += eps;
}

double AuditReport::max_relative() const {
    double m = 0.0;
    for (const auto& it : items) m = std::max(m, it.relative());
    return m;
}

namespace {

// Deterministic triple sampler over 0 <= s < u < t <= n.
struct TripleSampler {
    int p;
    size_t total;
    bool exhaustive;
    std::mt19937_64 rng;
    int s = 0, u = 1, t = 2;
    size_t emitted = 0, budget;

    TripleSampler(int points, size_t max_checks, uint64_t seed)
        : p(points), rng(seed) {
        total = static_cast<size_t>(p) * (p - 1) * (p - 2) / 6;
        exhaustive = total <= max_checks;
        budget = exhaustive ? total : max_checks;
    }
    bool next(int& os, int& ou, int& ot) {
        if (emitted >= budget) return false;
        ++emitted;
        if (exhaustive) {
            os = s; ou = u; ot = t;
            if (++t >= p) {
                if (++u >= p - 1) { ++s; u = s + 1; }
                t = u + 1;
            }
            return true;
        }
        std::uniform_int_distribution<int> d(0, p - 1);
        int a, b, c;
        do { a = d(rng); b = d(rng); c = d(rng); } while (a >= b || b >= c);
        os = a; ou = b; ot = c;
        return true;
    }
};

}  // namespace

AuditReport verify_hypotheses(const RoughLift3& L, size_t max_checks, uint64_t seed) {
    AuditReport rep;
    int d = L.dim();
    int p = L.grid().points();
    double xscale = 0.0;
    for (double v : L.path().values) xscale = std::max(xscale, std::abs(v));
    double s2 = std::max(1.0, xscale * xscale);
    double s3 = std::max(1.0, xscale * xscale * xscale);

    std::vector<double> ast(d * d), asu(d * d), aut(d * d), dsu(d), dut(d), dst(d);
    std::vector<double> vst(d * d * d), vsu(d * d * d), vut(d * d * d);
    double chen2_res = 0.0, chen3_res = 0.0;
    TripleSampler ts(p, max_checks, seed ^ 0x9e3779b97f4a7c15ull);
    int s, u, t;
    while (ts.next(s, u, t)) {
        L.area(s, t, ast.data());
        L.area(s, u, asu.data());
        L.area(u, t, aut.data());
        L.dx(s, u, dsu.data());
        L.dx(u, t, dut.data());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double r = ast[i * d + j] - asu[i * d + j] - aut[i * d + j] - dsu[i] * dut[j];
                chen2_res = std::max(chen2_res, std::abs(r));
            }
        L.volume(s, t, vst.data());
        L.volume(s, u, vsu.data());
        L.volume(u, t, vut.data());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double r = vst[(i * d + j) * d + k] - vsu[(i * d + j) * d + k] -
                               vut[(i * d + j) * d + k] - asu[i * d + j] * dut[k] -
                               dsu[i] * aut[j * d + k];
                    chen3_res = std::max(chen3_res, std::abs(r));
                }
    }
    rep.items.push_back({"chen_level2", chen2_res, s2});
    rep.items.push_back({"chen_level3", chen3_res, s3});

    // geometric symmetry over pairs
    double sym_res = 0.0;
    std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbull);
    size_t pairs = static_cast<size_t>(p) * (p - 1) / 2;
    size_t budget = std::min(pairs, max_checks);
    std::uniform_int_distribution<int> pd(0, p - 1);
    for (size_t m = 0; m < budget; ++m) {
        int i, j;
        do { i = pd(rng); j = pd(rng); } while (i >= j);
        L.area(i, j, ast.data());
        L.dx(i, j, dst.data());
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double sym = 0.5 * (ast[a * d + b] + ast[b * d + a]);
                sym_res = std::max(sym_res, std::abs(sym - 0.5 * dst[a] * dst[b]));
            }
    }
    rep.items.push_back({"geometric_symmetry", sym_res, s2});
    return rep;
}

AuditReport verify_hypotheses(const DelayedLift& L, size_t max_checks, uint64_t seed) {
    AuditReport rep;
    int d = L.dim();
    int p = L.grid().points();
    double xscale = 0.0;
    for (double v : L.path().values) xscale = std::max(xscale, std::abs(v));
    double s2 = std::max(1.0, xscale * xscale);
    double s3 = std::max(1.0, xscale * xscale * xscale);

    std::vector<double> ast(d * d), asu(d * d), aut(d * d), a2(d * d), dsu(d), dut(d), dv(d), dvp(d);
    std::vector<double> vst(d * d * d), vsu(d * d * d), vut(d * d * d);

    // delayed Chen for each area family: delta x2(v,0)_{sut} = dx_{s-v,u-v} (x) dx_{u,t}
    for (int kv : L.difference_set()) {
        const AreaFamily& f = L.area_family(kv);
        double res = 0.0;
        TripleSampler ts(p, max_checks, seed ^ (0x100 + kv));
        int s, u, t;
        while (ts.next(s, u, t)) {
            if (s < f.c_lo || t - 1 > f.c_hi) continue;
            L.area(kv, s, t, ast.data());
            L.area(kv, s, u, asu.data());
            L.area(kv, u, t, aut.data());
            L.dx_shifted(s, u, kv, dsu.data());
            L.dx(u, t, dut.data());
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    res = std::max(res, std::abs(ast[i * d + j] - asu[i * d + j] -
                                                 aut[i * d + j] - dsu[i] * dut[j]));
        }
        rep.items.push_back({"delayed_chen_area_v=" + std::to_string(kv), res, s2});
    }

    // delayed Chen for volumes: delta x3(v1,v2)_{sut} =
    //   x2_{su}(v1,v2) (x) dx_{ut} + dx(v1+v2)_{su} (x) x2_{ut}(v2,0)
    int q = L.delay_count();
    std::vector<std::pair<int, int>> vol_keys;
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) vol_keys.push_back({L.delay_cells()[jp], L.delay_cells()[ip]});
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp)
            vol_keys.push_back({L.delay_cells()[jp] - L.delay_cells()[ip], L.delay_cells()[ip]});
    std::sort(vol_keys.begin(), vol_keys.end());
    vol_keys.erase(std::unique(vol_keys.begin(), vol_keys.end()), vol_keys.end());
    for (auto [k1, k2] : vol_keys) {
        const VolumeFamily& f = L.volume_family(k1, k2);
        double res = 0.0;
        TripleSampler ts(p, max_checks, seed ^ (0x200 + 31 * k1 + k2));
        int s, u, t;
        while (ts.next(s, u, t)) {
            if (s < f.c_lo || t - 1 > f.c_hi) continue;
            L.volume(k1, k2, s, t, vst.data());
            L.volume(k1, k2, s, u, vsu.data());
            L.volume(k1, k2, u, t, vut.data());
            // x2_{su}(v1,v2) via shift identity
            L.area(k1, s - k2, u - k2, asu.data());
            L.area(k2, u, t, aut.data());
            L.dx_shifted(s, u, k1 + k2, dsu.data());
            L.dx(u, t, dut.data());
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        double r = vst[(i * d + j) * d + k] - vsu[(i * d + j) * d + k] -
                                   vut[(i * d + j) * d + k] - asu[i * d + j] * dut[k] -
                                   dsu[i] * aut[j * d + k];
                        res = std::max(res, std::abs(r));
                    }
        }
        rep.items.push_back({"delayed_chen_volume_v1=" + std::to_string(k1) +
                                 "_v2=" + std::to_string(k2),
                             res, s3});
    }

    // product identity over the delay set:
    // dx(v)_{st} (x) dx(v')_{st} = x2_{st}(v-v', v') + (x2_{st}(v'-v, v))^T,
    // with x2(v'', v) realized through the shift identity.
    std::mt19937_64 rng(seed ^ 0xabcdefull);
    for (int iv = 0; iv <= q; ++iv)
        for (int jv = 0; jv <= q; ++jv) {
            int kv = L.delay_cells()[iv], kvp = L.delay_cells()[jv];
            double res = 0.0;
            const AreaFamily& fa = L.area_family(kv - kvp);
            const AreaFamily& fb = L.area_family(kvp - kv);
            int lo = std::max({fa.c_lo + kvp, fb.c_lo + kv, std::max(kv, kvp)});
            int hi = std::min(fa.c_hi + kvp, fb.c_hi + kv) + 1;
            if (lo >= hi) continue;
            std::uniform_int_distribution<int> pd(lo, hi);
            size_t budget = std::min<size_t>(max_checks, 2000);
            for (size_t m = 0; m < budget; ++m) {
                int i = pd(rng), j = pd(rng);
                if (i >= j) continue;
                L.dx_shifted(i, j, kv, dv.data());
                L.dx_shifted(i, j, kvp, dvp.data());
                L.area(kv - kvp, i - kvp, j - kvp, ast.data());   // x2(v-v', v')
                L.area(kvp - kv, i - kv, j - kv, a2.data());      // x2(v'-v, v)
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        double r = dv[a] * dvp[b] - ast[a * d + b] - a2[b * d + a];
                        res = std::max(res, std::abs(r));
                    }
            }
            rep.items.push_back({"product_identity_v=" + std::to_string(kv) +
                                     "_v'=" + std::to_string(kvp),
                                 res, s2});
        }
    return rep;
}

}  // namespace rough
