#pragma once

#include <vector>

#include "rough/lift.hpp"
#include "rough/sde.hpp"
#include "rough/vector_field.hpp"

namespace rough {

/// Delay set r_1 < ... < r_q (r_0 = 0 implicit), each a grid multiple.
struct DelaySpec {
    std::vector<double> delays;

    explicit DelaySpec(std::vector<double> r);
    int q() const { return static_cast<int>(delays.size()); }
    double r_max() const { return delays.empty() ? 0.0 : delays.back(); }
};

/// Deterministic initial segment on [-r_q, 0] (its grid must end at t = 0 and
/// match the driver step). Enters the solution value-wise only; its controlled
/// coefficients are zero.
struct InitialSegment {
    Path1 xi;
};

/// The coefficient families of one germ evaluation point, produced by
/// composing sigma with the solution history:
///   zeta1[i'']        (n x d x d)      against x2(r_{i''})^{ji}
///   zeta2[(i',j')]    (n x d x d x d)  against x3(r_{j'}, r_{i'})^{kji}, 1 <= i',j' <= q
///   zeta3[(i'',j'')]  (n x d x d x d)  against x3(r_{j''}-r_{i''}, r_{i''})^{kji}
struct DoublyDelayedCoefficients {
    int n = 0, d = 0, q = 0;
    std::vector<double> m;                          // n*d
    std::vector<std::vector<double>> zeta1;         // q+1 families
    std::vector<std::vector<double>> zeta2;         // q*q families, (i'-1)*q + (j'-1)
    std::vector<std::vector<double>> zeta3;         // (q+1)^2 families, i''*(q+1) + j''

    const std::vector<double>& z2(int ip, int jp) const { return zeta2[(ip - 1) * q + (jp - 1)]; }
    const std::vector<double>& z3(int ip, int jp) const { return zeta3[ip * (q + 1) + jp]; }
};

/// History snapshot feeding one coefficient assembly: per delay slot
/// i' = 0..q, the solution value at t - r_{i'} plus (for i' >= 1) its
/// first-level coefficient and second-level families there. Slot 0 of zeta1
/// and zeta2 is ignored: the current-time coefficients are recomputed
/// self-consistently inside t_sigma_coeffs.
struct DelayHistory {
    std::vector<std::vector<double>> w;                   // (q+1) x n
    std::vector<std::vector<double>> zeta1;               // (q+1) x (n*d)
    std::vector<std::vector<std::vector<double>>> zeta2;  // (q+1) x (q+1) x (n*d*d)
};

/// Composition map applied to sigma along the current solution history.
/// Families per the chain rule for doubly delayed decompositions, including
/// the indicator-gated terms at i' = j' and (i' = 0, j' != 0).
DoublyDelayedCoefficients t_sigma_coeffs(const DelayVectorField& sigma, const DelayHistory& hist);

/// Four-family germ increment over one finest cell, read from the lift's
/// per-cell family storage. Throws MissingLiftFamily naming the absent pair.
void dde_germ_cell(const DoublyDelayedCoefficients& coeffs, const DelayedLift& lift, int cell,
                   double* out);

/// Germ over an arbitrary grid span with the coefficients frozen at the left
/// end (diagnostics and coarse Riemann sums).
void dde_germ_span(const DoublyDelayedCoefficients& coeffs, const DelayedLift& lift, int i, int j,
                   double* out);

/// Increment path obtained by marching per-cell germs coeffs[c] over the cells
/// first_cell + c; starts at zero.
Path1 delayed_integrate(const std::vector<DoublyDelayedCoefficients>& coeffs,
                        const DelayedLift& lift, int first_cell);

/// Explicit march of the delay equation dy = sigma(y_t, y_{t-r_1}, ...) dx on
/// [0, T], y = xi on [-r_q, 0]. The reported path spans [-r_q, T].
SolveReport solve_dde(const InitialSegment& xi, const DelayVectorField& sigma,
                      const DelayedLift& lift, double kappa = 0.25);

/// Solves both instances and reports the solution kappa-norm distance
/// (kappa = 0.95 gamma) against the summed input distances (xi at 3 gamma,
/// driver at gamma, area families at 2 gamma, volume families at 3 gamma).
ContinuityReport dde_continuity_probe(const InitialSegment& xi1, const InitialSegment& xi2,
                                      const DelayVectorField& sigma, const DelayedLift& lift1,
                                      const DelayedLift& lift2, double gamma);

}  // namespace rough
