#pragma once

#include <cstdint>
#include <vector>

#include "rough/grid.hpp"

namespace rough {

/// Fractional Brownian covariance R_H(t, s) = 1/2 (|t|^{2H} + |s|^{2H} - |t-s|^{2H}),
/// defined on the whole real line.
double fbm_cov(double s, double t, double H);

/// Sampling request for d independent fBm components on a grid that must
/// contain t = 0 (the path is pinned there). H is restricted to (1/4, 1),
/// the validity range of the level-3 solvers.
struct FbmSpec {
    double H;
    int d;
    Grid grid;
    uint64_t seed;

    FbmSpec(double H_, int d_, const Grid& g, uint64_t seed_);
};

/// Exact Gaussian sample of fractional Gaussian noise via circulant embedding,
/// cumulated to a path with B_0 = 0 at time zero. Falls back to a dense
/// covariance factorization when the embedding is not positive semi-definite.
/// Deterministic for a given spec.
Path1 sample_fbm(const FbmSpec& spec);

/// Closed-form mean of the diagonal of the delayed Levy area over a span tau:
///   v1 = 0:  tau^{2H} / 2
///   v1 > 0: -H v1^{2H-1} tau + ((tau+v1)^{2H} - v1^{2H}) / 2
///   v1 < 0:  H (-v1)^{2H-1} tau + (|tau+v1|^{2H} - (-v1)^{2H}) / 2
double expected_diag_area(double v1, double tau, double H);

struct McAreaReport {
    double H, v1, tau;
    int N, n;
    double mean, stderr_, closed_form, z;
};

/// Monte-Carlo check of the delayed-area mean against the closed form:
/// samples N paths, builds A(v1) through the delayed lift, averages the
/// diagonal entry over [0, tau]. z = |mean - closed_form| / stderr.
McAreaReport mc_validate_area(double H, double v1, int N, int n, double tau, uint64_t seed,
                              int workers = 1);

struct ScalingReport {
    int level;
    double H, v1, v2;
    double slope;
    std::vector<double> taus;
    std::vector<double> second_moments;  // E |X_{0,tau}|^2 estimates
};

/// Least-squares slope of log E|X_{0,tau}|^2 against log tau, where X is the
/// delayed area (level 2) or doubly delayed volume (level 3). Expected near
/// 4H resp. 6H. `n_per_unit` is the sampling resolution (cells per unit time).
ScalingReport mc_scaling_exponent(int level, double H, double v1, double v2,
                                  const std::vector<double>& taus, int N, int n_per_unit,
                                  uint64_t seed, int workers = 1);

}  // namespace rough
