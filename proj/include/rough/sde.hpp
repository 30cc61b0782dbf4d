#pragma once

#include <string>
#include <vector>

#include "rough/controlled.hpp"
#include "rough/lift.hpp"
#include "rough/vector_field.hpp"

namespace rough {

struct SolveReport {
    Path1 y;
    double germ_residual = 0.0;  // Hoelder surrogate of the germ incoherence delta Xi
    int steps = 0;
    std::string method;          // "step3" or "picard"
    int picard_iters = -1;       // -1 when the explicit march was used
};

/// One explicit third-order step: with sigma and its derivatives at y,
///   (dy)^i = s^{ij} dx^j + [d_m s^{ij} s^{mk}] x2^{kj}
///          + [d_m s^{ij} d_p s^{mk1} s^{pk2} + d_{mp} s^{ij} s^{mk1} s^{pk2}] x3^{k2 k1 j}.
/// x2 is d x d, x3 is d x d x d (row-major), out has l entries.
void step3(const double* y, const VectorField& sigma, const double* dx, const double* x2,
           const double* x3, double* out);

/// Explicit march of the step3 germ over every finest cell, y(t0) = a.
SolveReport solve_sde(const std::vector<double>& a, const VectorField& sigma,
                      const RoughLift3& lift, double kappa = 0.25);

/// Fixed-point alternative: iterate z <- a + integral of sigma(z) dx on
/// windows, halving the window on empirical divergence (floor: 4 cells),
/// patching windows sequentially. Stops a window when the sup-norm change
/// drops below tol; throws NoConvergence past max_iter or below the floor.
SolveReport picard_solve(const std::vector<double>& a, const VectorField& sigma,
                         const RoughLift3& lift, double tol, int max_iter,
                         double kappa = 0.25);

struct ContinuityReport {
    double solution_distance = 0.0;  // kappa-norm of y1 - y2, kappa = 0.95 gamma
    double input_distance = 0.0;     // gamma/2gamma/3gamma norms of the lift differences
};

/// Solves on both lifts (same grid required) and reports the solution
/// distance against the summed distances of path, area and volume.
ContinuityReport continuity_probe(const std::vector<double>& a, const VectorField& sigma,
                                  const RoughLift3& lift1, const RoughLift3& lift2,
                                  double gamma);

}  // namespace rough
