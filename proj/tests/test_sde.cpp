#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rough/fbm.hpp"
#include "rough/sde.hpp"

using namespace rough;
using namespace testutil;

namespace {

RoughLift3 linear_time_lift(int n, double T = 1.0) {
    Grid g(0.0, T / n, n);
    Path1 x(g, 1);
    for (int i = 0; i <= n; ++i) x.at(i, 0) = g.t(i);
    return RoughLift3::lift_linear(x);
}

}  // namespace

TEST_CASE("step3 elementary values") {
    SUBCASE("zero field does not move") {
        VectorField sigma = make_field("zero", 2, 2, {});
        double y[2] = {1.0, -1.0}, dx[2] = {0.3, 0.4};
        double x2[4] = {0.1, 0.0, 0.0, 0.1}, x3[8] = {};
        double out[2] = {9, 9};
        step3(y, sigma, dx, x2, x3, out);
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 0.0);
    }
    SUBCASE("constant field moves by sigma dx only") {
        VectorField sigma = make_field("constant", 1, 2, {2.0, 3.0});
        double y = 0.0, dx[2] = {0.5, -0.25};
        double x2[4] = {0.7, 0.7, 0.7, 0.7}, x3[8] = {0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7};
        double out;
        step3(&y, sigma, dx, x2, x3, &out);
        CHECK(out == doctest::Approx(2.0 * 0.5 + 3.0 * -0.25).epsilon(1e-14));
    }
    SUBCASE("scalar linear field: third-order exponential increment") {
        VectorField sigma = make_field("linear", 1, 1, {});
        double y = 1.0, dx = 0.1, x2 = 0.005, x3 = 0.1 * 0.1 * 0.1 / 6;
        double out;
        step3(&y, sigma, &dx, &x2, &x3, &out);
        CHECK(out == doctest::Approx(0.10516666666666667).epsilon(1e-15));
    }
}

TEST_CASE("linear scalar equation reproduces the exponential") {
    VectorField sigma = make_field("linear", 1, 1, {});
    RoughLift3 L = linear_time_lift(64);
    SolveReport rep = solve_sde({1.0}, sigma, L);
    CHECK(rep.method == "step3");
    CHECK(std::abs(rep.y.at(64, 0) - std::exp(1.0)) <= 1e-6);
    SUBCASE("error drops by about 2^3 when the step halves") {
        SolveReport fine = solve_sde({1.0}, sigma, linear_time_lift(128));
        double e1 = std::abs(rep.y.at(64, 0) - std::exp(1.0));
        double e2 = std::abs(fine.y.at(128, 0) - std::exp(1.0));
        double ratio = e1 / e2;
        CHECK(ratio > 5.0);
        CHECK(ratio < 13.0);
    }
}

TEST_CASE("constant field integrates exactly") {
    Grid g(0.0, 1.0 / 32, 32);
    Path1 x = random_path(g, 2, 71);
    RoughLift3 L = RoughLift3::lift_linear(x);
    VectorField sigma = make_field("constant", 1, 2, {2.0, -1.0});
    SolveReport rep = solve_sde({0.5}, sigma, L);
    for (int i = 0; i <= g.n; ++i) {
        double expect = 0.5 + 2.0 * (x.at(i, 0) - x.at(0, 0)) - (x.at(i, 1) - x.at(0, 1));
        CHECK(rep.y.at(i, 0) == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(rep.germ_residual <= 1e-12);
}

TEST_CASE("rotation preserves the radius approximately") {
    Grid g(0.0, 1.0 / 256, 256);
    FbmSpec spec(0.4, 1, g, 404);
    Path1 x = sample_fbm(spec);
    RoughLift3 L = RoughLift3::lift_linear(x);
    VectorField sigma = make_field("rotation", 2, 1, {});
    SolveReport rep = solve_sde({1.0, 0.0}, sigma, L);
    for (int i = 0; i <= g.n; ++i) {
        double r = std::hypot(rep.y.at(i, 0), rep.y.at(i, 1));
        CHECK(std::abs(r - 1.0) <= 1e-2);
    }
}

TEST_CASE("flow property: restarting from the midpoint state is bitwise stable") {
    Grid g(0.0, 1.0 / 64, 64);
    Path1 x = random_path(g, 1, 72);
    RoughLift3 L = RoughLift3::lift_linear(x);
    VectorField sigma = make_field("sine", 1, 1, {1.0, 0.5});
    SolveReport full = solve_sde({0.2}, sigma, L);
    // Second half as its own problem, started from the midpoint value.
    Grid gh(0.5, g.h, 32);
    Path1 xh(gh, 1);
    for (int i = 0; i <= 32; ++i) xh.at(i, 0) = x.at(32 + i, 0);
    RoughLift3 Lh = RoughLift3::lift_linear(xh);
    SolveReport half = solve_sde({full.y.at(32, 0)}, sigma, Lh);
    for (int i = 0; i <= 32; ++i) CHECK(half.y.at(i, 0) == full.y.at(32 + i, 0));
}

TEST_CASE("component relabeling is equivariant") {
    // Swapping the two driver components and the two sigma columns gives the
    // same solution.
    Grid g(0.0, 1.0 / 64, 64);
    Path1 x = random_path(g, 2, 73);
    Path1 xs(g, 2);
    for (int i = 0; i <= g.n; ++i) {
        xs.at(i, 0) = x.at(i, 1);
        xs.at(i, 1) = x.at(i, 0);
    }
    RoughLift3 L = RoughLift3::lift_linear(x);
    RoughLift3 Ls = RoughLift3::lift_linear(xs);
    VectorField sigma = make_field("constant", 1, 2, {2.0, -1.0});
    VectorField sigmas = make_field("constant", 1, 2, {-1.0, 2.0});
    SolveReport a = solve_sde({0.0}, sigma, L);
    SolveReport b = solve_sde({0.0}, sigmas, Ls);
    for (int i = 0; i <= g.n; ++i)
        CHECK(std::abs(a.y.at(i, 0) - b.y.at(i, 0)) <= 1e-12 * std::max(1.0, std::abs(a.y.at(i, 0))));
}

TEST_CASE("picard_solve base cases") {
    RoughLift3 L = linear_time_lift(32);
    SUBCASE("zero field converges immediately") {
        VectorField sigma = make_field("zero", 1, 1, {});
        SolveReport rep = picard_solve({3.0}, sigma, L, 1e-12, 50);
        CHECK(rep.method == "picard");
        CHECK(rep.picard_iters >= 1);
        CHECK(rep.picard_iters <= 2);
        for (int i = 0; i <= 32; ++i) CHECK(rep.y.at(i, 0) == 3.0);
    }
    SUBCASE("constant field converges in two sweeps") {
        VectorField sigma = make_field("constant", 1, 1, {2.0});
        SolveReport rep = picard_solve({1.0}, sigma, L, 1e-12, 50);
        CHECK(rep.picard_iters <= 3);
        CHECK(rep.y.at(32, 0) == doctest::Approx(1.0 + 2.0).epsilon(1e-12));
    }
}

TEST_CASE("picard and explicit march agree on smooth problems") {
    double tol = 1e-10;
    SUBCASE("exponential") {
        VectorField sigma = make_field("linear", 1, 1, {});
        RoughLift3 L = linear_time_lift(64);
        SolveReport a = solve_sde({1.0}, sigma, L);
        SolveReport b = picard_solve({1.0}, sigma, L, tol, 200);
        double diff = 0.0;
        for (int i = 0; i <= 64; ++i) diff = std::max(diff, std::abs(a.y.at(i, 0) - b.y.at(i, 0)));
        CHECK(diff <= std::max(10.0 * tol, 1e-8));
    }
    SUBCASE("rotation") {
        VectorField sigma = make_field("rotation", 2, 1, {});
        RoughLift3 L = linear_time_lift(64);
        SolveReport a = solve_sde({1.0, 0.0}, sigma, L);
        SolveReport b = picard_solve({1.0, 0.0}, sigma, L, tol, 200);
        double diff = 0.0;
        for (int i = 0; i <= 64; ++i)
            for (int c = 0; c < 2; ++c)
                diff = std::max(diff, std::abs(a.y.at(i, c) - b.y.at(i, c)));
        CHECK(diff <= std::max(10.0 * tol, 1e-8));
    }
}

TEST_CASE("continuity probe") {
    Grid g(0.0, 1.0 / 128, 128);
    double H = 0.4, gamma = 0.38;
    FbmSpec s1(H, 1, g, 51), s2(H, 1, g, 52);
    Path1 x1 = sample_fbm(s1), x2 = sample_fbm(s2);
    VectorField sigma = make_field("sine", 1, 1, {1.0, 0.5});
    SUBCASE("identical lifts give zero distance") {
        RoughLift3 L = RoughLift3::lift_linear(x1);
        ContinuityReport rep = continuity_probe({0.1}, sigma, L, L, gamma);
        CHECK(rep.solution_distance == 0.0);
        CHECK(rep.input_distance == 0.0);
    }
    SUBCASE("ratio is stable across perturbation decades") {
        RoughLift3 L1 = RoughLift3::lift_linear(x1);
        std::vector<double> ratios;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            Path1 xp = x1;
            for (int i = 0; i <= g.n; ++i) xp.at(i, 0) += eps * x2.at(i, 0);
            RoughLift3 L2 = RoughLift3::lift_linear(xp);
            ContinuityReport rep = continuity_probe({0.1}, sigma, L1, L2, gamma);
            CHECK(rep.input_distance > 0.0);
            ratios.push_back(rep.solution_distance / rep.input_distance);
        }
        for (double r : ratios) {
            CHECK(r <= 10.0 * ratios[0] + 1e-15);
            CHECK(r >= 0.1 * ratios[0]);
        }
    }
}
