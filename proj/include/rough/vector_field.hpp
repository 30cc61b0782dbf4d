#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rough/errors.hpp"

namespace rough {

/// A smooth map R^in -> R^out with explicit first and second partials.
/// Layouts are row-major: jac is out x in, hess is out x in x in.
struct SmoothMap {
    int in_dim = 0;
    int out_dim = 0;
    std::function<void(const double*, double*)> eval;
    std::function<void(const double*, double*)> jac;
    std::function<void(const double*, double*)> hess;
    bool finite_difference = false;  // derivative fallback in use (flagged in reports)

    /// Central finite-difference derivatives with step 1e-5, for user maps
    /// that supply only values.
    static SmoothMap with_fd(int in, int out, std::function<void(const double*, double*)> f);

    /// Max relative error of jac/hess against central differences at `probes`.
    double derivative_consistency(const std::vector<std::vector<double>>& probes) const;
};

/// Diffusion coefficient sigma: R^l -> R^{l x d}, flattened row-major
/// (state index first). jac adds a trailing state index, hess two.
struct VectorField {
    int l = 0;
    int d = 0;
    SmoothMap map;  // in = l, out = l*d

    VectorField() = default;
    VectorField(int l_, int d_, SmoothMap m);
};

/// Delay coefficient sigma: (R^n)^{q+1} -> R^{n x d}; the input is the
/// concatenation (w_0, w_1, ..., w_q) of the current and delayed states.
/// Slot partials are slices of the full jacobian.
struct DelayVectorField {
    int n = 0;
    int d = 0;
    int q = 0;
    SmoothMap map;  // in = (q+1)*n, out = n*d

    DelayVectorField() = default;
    DelayVectorField(int n_, int d_, int q_, SmoothMap m);
};

/// Built-in catalog: zero, constant, linear, rotation, polynomial, sine.
/// `params` meaning depends on the entry (documented in the README).
VectorField make_field(const std::string& name, int l, int d, const std::vector<double>& params);

/// Delayed catalog entries: delay-linear, delay-feedback, plus every
/// non-delayed entry lifted to ignore the delayed slots.
DelayVectorField make_delay_field(const std::string& name, int n, int d, int q,
                                  const std::vector<double>& params);

}  // namespace rough
