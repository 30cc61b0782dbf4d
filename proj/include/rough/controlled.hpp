#pragma once

#include <utility>

#include "rough/increments.hpp"
#include "rough/lift.hpp"
#include "rough/vector_field.hpp"

namespace rough {

/// Weakly controlled path: z together with its coefficient paths against the
/// driver increments and areas,
///   (delta z)^i = zeta1^{ij} (delta x)^j + zeta2^{ijk} (x2)^{kj} + r^i,
///   (delta zeta1)^{ij} = zeta2^{ijk} (delta x)^k + rho^{ij},
/// the remainders r, rho being residuals of these decompositions.
struct ControlledPath {
    const RoughLift3* lift = nullptr;
    double kappa = 0.25;
    Path1 z;      // dim l
    Path1 zeta1;  // dim l*d
    Path1 zeta2;  // dim l*d*d

    int l() const { return z.dim; }
    int d() const { return lift->dim(); }
};

/// x viewed as controlled by itself: zeta1 = Id, zeta2 = 0.
ControlledPath self_controlled(const RoughLift3& lift, double kappa);

/// Residuals (r, rho) of the controlled decomposition at every grid pair.
std::pair<Inc2, Inc2> remainders(const ControlledPath& z);

/// Sum of the seven discrete semi-norm parts: kappa-norm of z, sup and kappa
/// norms of zeta1 and zeta2, 2kappa-norm of rho, 3kappa-norm of r.
double controlled_norm(const ControlledPath& z);

/// Composition with a smooth map phi: R^l -> R^m. Coefficients:
///   zeta1_out^{oj} = d_i phi^o zeta1^{ij}
///   zeta2_out^{ojk} = d_i phi^o zeta2^{ijk} + d_{i1 i2} phi^o zeta1^{i1 j} zeta1^{i2 k}
/// Remainders are never assembled from the expansion; they stay residuals.
ControlledPath compose(const SmoothMap& phi, const ControlledPath& z);

struct IntegrateResult {
    ControlledPath z;       // values in R^l, starts at 0
    double germ_residual;   // Hoelder surrogate of delta Xi over sampled triples
};

/// Rough integral of an l x d-valued controlled path m against the lift:
/// sewing of the third-order germ
///   Xi^i_{st} = m^{ij}_s dx^j + mu1^{ijk}_s (x2)^{kj} + mu2^{ijk1k2}_s (x3)^{k2 k1 j}
/// over the finest cells, with mu1 = m.zeta1 and mu2 = m.zeta2. The output is
/// controlled with zeta1 = m, zeta2 = mu1.
IntegrateResult integrate(const ControlledPath& m);

/// Germ value Xi_{st} for a sub-grid pair (coarse Riemann-sum studies).
std::vector<double> germ_value(const ControlledPath& m, int i, int j);

/// Riemann sum of the germ over the sub-grid of stride `stride` within [i, j].
std::vector<double> germ_riemann_sum(const ControlledPath& m, int i, int j, int stride);

}  // namespace rough
