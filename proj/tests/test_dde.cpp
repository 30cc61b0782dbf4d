#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rough/dde.hpp"
#include "rough/fbm.hpp"

using namespace rough;
using namespace testutil;

namespace {

// Driver grid reaching back to -2 r_q, as the volume families require.
Grid driver_grid(double rq, double T, double h) {
    int back = static_cast<int>(std::lround(2 * rq / h));
    int fwd = static_cast<int>(std::lround(T / h));
    return Grid(-2 * rq, h, back + fwd);
}

InitialSegment constant_segment(double rq, double h, int n, double value) {
    int kq = static_cast<int>(std::lround(rq / h));
    InitialSegment seg;
    seg.xi = Path1(Grid(-rq, h, kq), n);
    for (double& v : seg.xi.values) v = value;
    return seg;
}

}  // namespace

TEST_CASE("delay spec validation") {
    CHECK_THROWS_AS(DelaySpec({-0.1}), ConfigError);
    CHECK_THROWS_AS(DelaySpec({0.2, 0.2}), ConfigError);
    CHECK_THROWS_AS(DelaySpec({0.3, 0.1}), ConfigError);
    DelaySpec ok({0.1, 0.3});
    CHECK(ok.q() == 2);
    CHECK(ok.r_max() == 0.3);
}

TEST_CASE("t_sigma_coeffs: history-blind sigma collapses to the plain composition") {
    // sigma ignores the delayed slots, so every family tied to a delayed index
    // must vanish and the surviving ones reproduce the non-delayed chain rule.
    int n = 1, d = 1, q = 1;
    DelayVectorField sigma = make_delay_field("polynomial", n, d, q, {0.0, 1.0, 0.5});
    DelayHistory hist;
    hist.w = {{0.7}, {123.0}};
    hist.zeta1 = {{0.0}, {2.0}};
    hist.zeta2 = {{{0.0}, {0.0}}, {{3.0}, {4.0}}};
    DoublyDelayedCoefficients C = t_sigma_coeffs(sigma, hist);
    double y = 0.7;
    CHECK(C.m[0] == doctest::Approx(y + 0.5 * y * y));
    // Current-slot first-level family: d sigma / d w_0 times the self
    // coefficient, which t_sigma_coeffs seeds with m itself.
    CHECK(C.zeta1[0][0] == doctest::Approx((1.0 + y) * C.m[0]));
    CHECK(C.zeta1[1][0] == 0.0);
    for (double v : C.z2(1, 1)) CHECK(v == 0.0);
    for (double v : C.z3(1, 1)) CHECK(v == 0.0);
    for (double v : C.z3(0, 1)) CHECK(v == 0.0);
    for (double v : C.z3(1, 0)) CHECK(v == 0.0);
    // (0,0) family: first + second derivative terms of the plain chain rule.
    double dsig = 1.0 + y, d2sig = 1.0;
    double expect00 = dsig * C.zeta1[0][0] + d2sig * C.m[0] * C.m[0];
    CHECK(C.z3(0, 0)[0] == doctest::Approx(expect00));
}

TEST_CASE("t_sigma_coeffs: pure delay sigma routes history families") {
    // sigma(w0, w1) = w1 at n = d = q = 1: only the delayed slot derivative is
    // nonzero, so each output family is a copy of one history entry.
    DelayVectorField sigma = make_delay_field("delay-linear", 1, 1, 1, {0.0, 1.0});
    DelayHistory hist;
    hist.w = {{0.9}, {0.4}};
    hist.zeta1 = {{0.0}, {2.5}};                      // zeta1 at t - r_1
    hist.zeta2 = {{{0.0}, {0.0}}, {{1.5}, {-0.5}}};   // zeta2 families at t - r_1
    DoublyDelayedCoefficients C = t_sigma_coeffs(sigma, hist);
    CHECK(C.m[0] == doctest::Approx(0.4));
    CHECK(C.zeta1[0][0] == 0.0);
    CHECK(C.zeta1[1][0] == doctest::Approx(2.5));
    CHECK(C.z2(1, 1)[0] == doctest::Approx(-0.5));
    // Second derivative vanishes, so the (1,1) third family is the indicator
    // term carrying the (i' = j') self family of the history point.
    CHECK(C.z3(1, 1)[0] == doctest::Approx(1.5));
    CHECK(C.z3(0, 0)[0] == 0.0);
    CHECK(C.z3(0, 1)[0] == 0.0);
    CHECK(C.z3(1, 0)[0] == 0.0);
}

TEST_CASE("delayed_integrate of coefficient-free constants is a matrix-vector increment") {
    Grid g(-0.5, 1.0 / 16, 24);
    Path1 x = random_path(g, 2, 81);
    DelayedLift D = DelayedLift::build(x, {4 * g.h});
    int i0 = g.index_of(0.0);
    int cells = g.n - i0;
    DoublyDelayedCoefficients C;
    C.n = 1;
    C.d = 2;
    C.q = 1;
    C.m = {2.0, -1.0};
    C.zeta1.assign(2, std::vector<double>(4, 0.0));
    C.zeta2.assign(1, std::vector<double>(8, 0.0));
    C.zeta3.assign(4, std::vector<double>(8, 0.0));
    std::vector<DoublyDelayedCoefficients> per_cell(cells, C);
    Path1 z = delayed_integrate(per_cell, D, i0);
    for (int c = 0; c <= cells; ++c) {
        double expect =
            2.0 * (x.at(i0 + c, 0) - x.at(i0, 0)) - (x.at(i0 + c, 1) - x.at(i0, 1));
        CHECK(z.at(c, 0) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("history-blind delay equation matches the plain solver") {
    double h = 1.0 / 64, r = 4 * h, T = 0.5;
    Grid g = driver_grid(r, T, h);
    FbmSpec spec(0.4, 1, g, 808);
    Path1 x = sample_fbm(spec);
    DelayedLift D = DelayedLift::build(x, {r});
    DelayVectorField sigma = make_delay_field("sine", 1, 1, 1, {1.0, 0.5});
    InitialSegment seg = constant_segment(r, h, 1, 0.2);
    SolveReport a = solve_dde(seg, sigma, D);
    // Plain solve on the restriction of the driver to [0, T].
    int i0 = g.index_of(0.0);
    Path1 xs(Grid(0.0, h, g.n - i0), 1);
    for (int i = 0; i <= g.n - i0; ++i) xs.at(i, 0) = x.at(i0 + i, 0);
    RoughLift3 L = RoughLift3::lift_linear(xs);
    VectorField plain = make_field("sine", 1, 1, {1.0, 0.5});
    SolveReport b = solve_sde({0.2}, plain, L);
    int kq = static_cast<int>(std::lround(r / h));
    for (int i = 0; i <= g.n - i0; ++i)
        CHECK(std::abs(a.y.at(kq + i, 0) - b.y.at(i, 0)) <= 1e-12 * std::max(1.0, std::abs(b.y.at(i, 0))));
}

TEST_CASE("constant sigma integrates the delay equation exactly") {
    double h = 1.0 / 32, r = 3 * h, T = 0.5;
    Grid g = driver_grid(r, T, h);
    Path1 x = random_path(g, 2, 82);
    DelayedLift D = DelayedLift::build(x, {r});
    DelayVectorField sigma = make_delay_field("constant", 1, 2, 1, {2.0, -1.0});
    InitialSegment seg = constant_segment(r, h, 1, 0.5);
    SolveReport rep = solve_dde(seg, sigma, D);
    int i0 = g.index_of(0.0);
    int kq = 3;
    for (int i = 0; i <= g.n - i0; ++i) {
        double expect = 0.5 + 2.0 * (x.at(i0 + i, 0) - x.at(i0, 0)) -
                        (x.at(i0 + i, 1) - x.at(i0, 1));
        CHECK(rep.y.at(kq + i, 0) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(rep.germ_residual <= 1e-10);
}

TEST_CASE("pure delay equation reproduces the piecewise-polynomial solution") {
    // dy(t) = y(t - 1/4) dt with y = 1 on [-1/4, 0]: integrating band by band
    // gives polynomials of increasing degree.
    auto yexact = [](double t) {
        if (t <= 0.0) return 1.0;
        if (t <= 0.25) return 1.0 + t;
        if (t <= 0.5) {
            double u = t - 0.25;
            return 1.25 + u + u * u / 2;
        }
        if (t <= 0.75) {
            double u = t - 0.5;
            return 1.53125 + 1.25 * u + u * u / 2 + u * u * u / 6;
        }
        double u = t - 0.75;
        return 1.8776041666666667 + 1.53125 * u + 1.25 * u * u / 2 + u * u * u / 6 +
               u * u * u * u / 24;
    };
    double h = 1.0 / 64, r = 0.25, T = 1.0;
    Grid g = driver_grid(r, T, h);
    Path1 x(g, 1);
    for (int i = 0; i <= g.n; ++i) x.at(i, 0) = g.t(i);
    DelayedLift D = DelayedLift::build(x, {r});
    DelayVectorField sigma = make_delay_field("delay-linear", 1, 1, 1, {0.0, 1.0});
    InitialSegment seg = constant_segment(r, h, 1, 1.0);
    SolveReport rep = solve_dde(seg, sigma, D);
    int i0 = g.index_of(0.0);
    int kq = static_cast<int>(std::lround(r / h));
    double worst = 0.0;
    for (int i = 0; i <= g.n - i0; ++i)
        worst = std::max(worst, std::abs(rep.y.at(kq + i, 0) - yexact(i * h)));
    CHECK(worst <= 2e-5);
    SUBCASE("error shrinks under refinement") {
        double h2 = h / 2;
        Grid g2 = driver_grid(r, T, h2);
        Path1 x2(g2, 1);
        for (int i = 0; i <= g2.n; ++i) x2.at(i, 0) = g2.t(i);
        DelayedLift D2 = DelayedLift::build(x2, {r});
        InitialSegment seg2 = constant_segment(r, h2, 1, 1.0);
        SolveReport rep2 = solve_dde(seg2, sigma, D2);
        int i02 = g2.index_of(0.0);
        int kq2 = static_cast<int>(std::lround(r / h2));
        double worst2 = 0.0;
        for (int i = 0; i <= g2.n - i02; ++i)
            worst2 = std::max(worst2, std::abs(rep2.y.at(kq2 + i, 0) - yexact(i * h2)));
        CHECK(worst2 < 0.5 * worst);
    }
}

TEST_CASE("solution is causal in the driver") {
    double h = 1.0 / 32, r = 2 * h, T = 0.5;
    Grid g = driver_grid(r, T, h);
    Path1 x = random_path(g, 1, 83);
    DelayVectorField sigma = make_delay_field("delay-feedback", 1, 1, 1, {1.0, 0.4});
    InitialSegment seg = constant_segment(r, h, 1, 0.3);
    DelayedLift D1 = DelayedLift::build(x, {r});
    SolveReport a = solve_dde(seg, sigma, D1);
    // Perturb the driver strictly after t*.
    int istar = g.index_of(0.25);
    Path1 xp = x;
    for (int i = istar + 1; i <= g.n; ++i) xp.at(i, 0) += 0.5;
    DelayedLift D2 = DelayedLift::build(xp, {r});
    SolveReport b = solve_dde(seg, sigma, D2);
    int i0 = g.index_of(0.0);
    int kq = 2;
    for (int i = 0; i <= istar - i0; ++i) CHECK(a.y.at(kq + i, 0) == b.y.at(kq + i, 0));
    CHECK(a.y.at(kq + (g.n - i0), 0) != b.y.at(kq + (g.n - i0), 0));
}

TEST_CASE("initial segment is reproduced verbatim") {
    double h = 1.0 / 16, r = 3 * h, T = 0.25;
    Grid g = driver_grid(r, T, h);
    Path1 x = random_path(g, 1, 84);
    DelayedLift D = DelayedLift::build(x, {r});
    DelayVectorField sigma = make_delay_field("delay-linear", 1, 1, 1, {0.2, 0.8});
    InitialSegment seg;
    seg.xi = Path1(Grid(-r, h, 3), 1);
    seg.xi.at(0, 0) = 0.1;
    seg.xi.at(1, 0) = -0.2;
    seg.xi.at(2, 0) = 0.4;
    seg.xi.at(3, 0) = 0.15;
    SolveReport rep = solve_dde(seg, sigma, D);
    CHECK(rep.y.grid.t0 == doctest::Approx(-r));
    for (int i = 0; i <= 3; ++i) CHECK(rep.y.at(i, 0) == seg.xi.at(i, 0));
}

TEST_CASE("mismatched initial segment is rejected") {
    double h = 1.0 / 16, r = 3 * h;
    Grid g = driver_grid(r, 0.25, h);
    Path1 x = random_path(g, 1, 85);
    DelayedLift D = DelayedLift::build(x, {r});
    DelayVectorField sigma = make_delay_field("delay-linear", 1, 1, 1, {});
    InitialSegment bad;
    bad.xi = Path1(Grid(-r, h, 2), 1);  // too short
    CHECK_THROWS_AS(solve_dde(bad, sigma, D), DimensionMismatch);
}

TEST_CASE("two-delay equation runs and stays coherent") {
    double h = 1.0 / 32, T = 0.5;
    double r1 = 2 * h, r2 = 5 * h;
    Grid g = driver_grid(r2, T, h);
    FbmSpec spec(0.45, 1, g, 86);
    Path1 x = sample_fbm(spec);
    DelayedLift D = DelayedLift::build(x, {r1, r2});
    DelayVectorField sigma = make_delay_field("delay-feedback", 1, 1, 2, {0.7, 0.3});
    InitialSegment seg = constant_segment(r2, h, 1, 0.25);
    SolveReport rep = solve_dde(seg, sigma, D);
    for (double v : rep.y.values) CHECK(std::isfinite(v));
    CHECK(rep.germ_residual < 1.0);
}

TEST_CASE("dde continuity probe") {
    double h = 1.0 / 64, r = 4 * h, T = 0.5;
    Grid g = driver_grid(r, T, h);
    FbmSpec s1(0.4, 1, g, 87), s2(0.4, 1, g, 88);
    Path1 x1 = sample_fbm(s1), x2 = sample_fbm(s2);
    DelayVectorField sigma = make_delay_field("delay-feedback", 1, 1, 1, {1.0, 0.3});
    InitialSegment seg = constant_segment(r, h, 1, 0.2);
    double gamma = 0.38;
    SUBCASE("identical instances give zero distances") {
        DelayedLift D = DelayedLift::build(x1, {r});
        ContinuityReport rep = dde_continuity_probe(seg, seg, sigma, D, D, gamma);
        CHECK(rep.solution_distance == 0.0);
        CHECK(rep.input_distance == 0.0);
    }
    SUBCASE("small input distance keeps the solution distance comparable") {
        DelayedLift D1 = DelayedLift::build(x1, {r});
        double ratio0 = 0.0;
        for (double eps : {1e-2, 1e-3}) {
            Path1 xp = x1;
            for (size_t i = 0; i < xp.values.size(); ++i) xp.values[i] += eps * x2.values[i];
            DelayedLift D2 = DelayedLift::build(xp, {r});
            ContinuityReport rep = dde_continuity_probe(seg, seg, sigma, D1, D2, gamma);
            CHECK(rep.input_distance > 0.0);
            double ratio = rep.solution_distance / rep.input_distance;
            if (ratio0 == 0.0)
                ratio0 = ratio;
            else {
                CHECK(ratio <= 10.0 * ratio0);
                CHECK(ratio >= 0.1 * ratio0);
            }
        }
    }
}
