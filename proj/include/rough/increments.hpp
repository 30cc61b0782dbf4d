#pragma once

#include <vector>

#include "rough/grid.hpp"

namespace rough {

// Dense increment storage is for test-scale grids only; larger grids go through
// the cell-level lift storage with on-demand Chen combination.
inline constexpr int kDenseGridLimit = 512;
inline constexpr size_t kDenseEntryLimit = 40'000'000;

/// 1-increment on a grid: values indexed by ordered point pairs (i < j),
/// zero at coinciding arguments. `comp` is the flattened coordinate count
/// (scalar, vector or matrix slot).
struct Inc2 {
    Grid grid;
    int comp = 1;
    std::vector<double> values;  // (i, j, c) over the full square, i==j rows are zero

    Inc2() = default;
    Inc2(const Grid& g, int c);

    double& at(int i, int j, int c) {
        return values[(static_cast<size_t>(i) * grid.points() + j) * comp + c];
    }
    double at(int i, int j, int c) const {
        return values[(static_cast<size_t>(i) * grid.points() + j) * comp + c];
    }
};

/// 2-increment on a grid: values indexed by ordered triples (i < j < k).
struct Inc3 {
    Grid grid;
    int comp = 1;
    std::vector<double> values;

    Inc3() = default;
    Inc3(const Grid& g, int c);

    size_t idx(int i, int j, int k) const {
        size_t p = grid.points();
        return ((static_cast<size_t>(i) * p + j) * p + k) * comp;
    }
    double& at(int i, int j, int k, int c) { return values[idx(i, j, k) + c]; }
    double at(int i, int j, int k, int c) const { return values[idx(i, j, k) + c]; }
};

/// (delta g)_{st} = g_t - g_s.
Inc2 delta1(const Path1& g);

/// (delta h)_{sut} = h_{st} - h_{su} - h_{ut}, at every ordered triple.
Inc3 delta2(const Inc2& h);

/// Discrete Hoelder norm sup |f_{st}| / |t-s|^mu over grid pairs
/// (Euclidean norm over components).
double holder_norm2(const Inc2& f, double mu);

/// Same norm for a path, via its increments.
double holder_norm2(const Path1& g, double mu);

/// Discrete sup |h_{sut}| / (|u-s|^gamma |t-u|^rho). The decomposition-infimum
/// norm is not computed; the single-split surrogate (mu/2, mu/2) is an upper
/// bound usable in its place.
double holder_norm3(const Inc3& h, double gamma, double rho);
inline double holder_norm3_surrogate(const Inc3& h, double mu) { return holder_norm3(h, mu / 2, mu / 2); }

/// Finest-partition telescoping: S(g)_{ij} = sum of g over the cells of [i, j].
/// delta(S(g)) = 0 exactly; S(g) = g when g is additive.
Inc2 sew(const Inc2& germ);

/// Discrete inverse of delta on closed 3-increments, normalized to vanish on
/// finest cells: g_{i,j+1} = g_{ij} + h_{i,j,j+1}. Requires delta h = 0 on the
/// grid (checked to `tol` * scale); satisfies delta(g) = h exactly and
/// lambda_grid(delta2(g)) = g - sew(g).
Inc2 lambda_grid(const Inc3& h, double tol = 1e-10);

/// Max |(delta h)_{sut}| over grid triples, for closedness checks.
double delta3_sup(const Inc3& h);

}  // namespace rough
