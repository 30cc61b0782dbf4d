#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rough/grid.hpp"

namespace rough {

/// a_st = a_su + a_ut + dx_su (x) dx_ut, in place on `a_su`.
void chen2(double* a_su, const double* a_ut, const double* dx_su, const double* dx_ut, int d);

/// v_st = v_su + v_ut + a_su (x) dx_ut + dx_su (x) a_ut, in place on `v_su`.
void chen3(double* v_su, const double* v_ut, const double* a_su, const double* a_ut,
           const double* dx_su, const double* dx_ut, int d);

/// Geometric level-3 lift of the piecewise-linear interpolant of a sampled path.
/// Cell values: x2 = 1/2 dx (x) dx, x3 = 1/6 dx (x) dx (x) dx; arbitrary spans
/// by Chen combination.
class RoughLift3 {
  public:
    RoughLift3() = default;
    static RoughLift3 lift_linear(const Path1& x);

    const Path1& path() const { return x_; }
    int dim() const { return x_.dim; }
    const Grid& grid() const { return x_.grid; }

    const double* area_cell(int c) const { return area_cells_.data() + static_cast<size_t>(c) * d2_; }
    const double* volume_cell(int c) const { return volume_cells_.data() + static_cast<size_t>(c) * d3_; }
    double* mutable_area_cell(int c) { return area_cells_.data() + static_cast<size_t>(c) * d2_; }

    void dx(int i, int j, double* out) const;           // d
    void area(int i, int j, double* out) const;         // d*d
    void volume(int i, int j, double* out) const;       // d*d*d

    std::vector<double> dx(int i, int j) const;
    std::vector<double> area(int i, int j) const;
    std::vector<double> volume(int i, int j) const;

  private:
    Path1 x_;
    int d2_ = 1, d3_ = 1;
    std::vector<double> area_cells_;
    std::vector<double> volume_cells_;
};

/// Per-cell family of delayed areas A(v) = x2(v, 0): cells_[c] = 1/2 dx_{c-k} (x) dx_c.
/// Valid only on cells where the shifted index stays on the grid.
struct AreaFamily {
    int k = 0;       // v = k*h
    int c_lo = 0;    // first valid cell
    int c_hi = -1;   // last valid cell
    std::vector<double> cells;  // full-length, d*d per cell; zero outside the window
};

/// Per-cell family of doubly delayed volumes V(v1, v2).
struct VolumeFamily {
    int k1 = 0, k2 = 0;
    int c_lo = 0, c_hi = -1;
    std::vector<double> cells;  // d*d*d per cell
};

/// Per-cell delayed area family for v = k*h (k may be negative).
AreaFamily delayed_area(const Path1& x, int k);

/// Per-cell doubly delayed volume family for (v1, v2) = (k1*h, k2*h).
/// Requires v2 >= 0 and v1 + v2 >= 0.
VolumeFamily delayed_volume(const Path1& x, int k1, int k2);

/// Delayed lift: driver on an extended grid plus the area families A(v) for v
/// in the delay-difference set and the volume families the delay solver needs
/// ((r_j', r_i') for 1 <= i',j' <= q and (r_j'' - r_i'', r_i'') for 0 <= i'',j'' <= q).
class DelayedLift {
  public:
    DelayedLift() = default;

    /// `delays` are r_1 < ... < r_q (r_0 = 0 implicit), each a grid multiple.
    /// The grid of `x` must reach back to -2 r_q when q >= 1 so that the
    /// (r_j', r_i') volume families are defined on all of [0, T].
    static DelayedLift build(const Path1& x, const std::vector<double>& delays);

    const Path1& path() const { return x_; }
    int dim() const { return x_.dim; }
    const Grid& grid() const { return x_.grid; }
    int delay_count() const { return static_cast<int>(kdel_.size()) - 1; }   // q
    const std::vector<int>& delay_cells() const { return kdel_; }            // k_0 = 0, ..., k_q
    const std::vector<int>& difference_set() const { return diff_; }

    const AreaFamily& area_family(int k) const;
    const VolumeFamily& volume_family(int k1, int k2) const;
    bool has_volume(int k1, int k2) const { return volumes_.count({k1, k2}) > 0; }

    void dx(int i, int j, double* out) const;
    /// Shifted increment (delta x(v))_{t_i t_j} = (delta x)_{t_i - v, t_j - v}.
    void dx_shifted(int i, int j, int k, double* out) const;

    /// x2(v, 0)_{t_i t_j} by delayed Chen combination over the finest cells.
    void area(int k, int i, int j, double* out) const;
    /// x3(v1, v2)_{t_i t_j} by the delayed Chen combination, consuming A(v1)
    /// (through the shift identity) and A(v2).
    void volume(int k1, int k2, int i, int j, double* out) const;

    std::vector<double> area(int k, int i, int j) const;
    std::vector<double> volume(int k1, int k2, int i, int j) const;

    /// Inject a perturbation into one area cell (fault-injection hook for audits).
    void perturb_area_cell(int k, int c, double eps);

  private:
    Path1 x_;
    int d2_ = 1, d3_ = 1;
    std::vector<int> kdel_;
    std::vector<int> diff_;
    std::map<int, AreaFamily> areas_;
    std::map<std::pair<int, int>, VolumeFamily> volumes_;
};

/// One identity residual of a hypothesis audit.
struct AuditItem {
    std::string identity;
    double residual = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0 ? residual / scale : residual; }
};

struct AuditReport {
    std::vector<AuditItem> items;
    double max_relative() const;
};

/// Residuals of Chen (levels 2 and 3) and the geometric symmetry over grid
/// triples/pairs (random sample of `max_checks` when exhaustive enumeration is
/// larger).
AuditReport verify_hypotheses(const RoughLift3& lift, size_t max_checks = 10'000,
                              uint64_t seed = 0);

/// Residuals of the delayed Chen relations (areas and volumes), the shift
/// identity and the product identity over the delay set.
AuditReport verify_hypotheses(const DelayedLift& lift, size_t max_checks = 10'000,
                              uint64_t seed = 0);

}  // namespace rough
