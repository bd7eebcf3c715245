/// @file auxgrid.hpp
/// @brief Quadtree auxiliary-grid index arithmetic: no tree is stored, every
///        subregion is addressed by (level, lexicographic cell index).
///
/// Level k tiles the bounding box with 2^k by 2^k congruent cells labeled
/// i = t1 + 2^k*t2, x-fastest. A cell's parent on level k-1 is found by
/// halving both tile coordinates, its finest-level members by binning DoF
/// coordinates. Cells can be empty; aggregation maps keep them.

#ifndef AUXAMG_AUXGRID_HPP
#define AUXAMG_AUXGRID_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace auxamg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Bounding box plus quadtree depth. Cells carry no storage.
struct AuxGrid {
    double a1 = 0.0, b1 = 1.0;   // x range
    double a2 = 0.0, b2 = 1.0;   // y range
    int depth = 1;               // L; level k in [0, L] has 4^k cells

    int width(int k) const { return 1 << k; }
    int cells(int k) const { return 1 << (2 * k); }
};

/// Maps each DoF of one level onto the aggregates of the next coarser level.
/// members is the exact inverse of agg_of; aggregates may be empty.
struct AggregationMap {
    int level = 0;              // level whose DoFs are being aggregated
    int n_aggregates = 0;
    std::vector<int> agg_of;    // agg_of[j] = i  <=>  j in members of i
    std::vector<int> member_ptr;
    std::vector<int> member_idx;

    std::span<const int> members(int i) const {
        return {member_idx.data() + member_ptr[i],
                static_cast<std::size_t>(member_ptr[i + 1] - member_ptr[i])};
    }
};

namespace detail {

/// Rebuilds member lists from agg_of by counting sort; keeps DoF order
/// within each aggregate ascending.
inline void build_members(AggregationMap& map) {
    map.member_ptr.assign(static_cast<std::size_t>(map.n_aggregates) + 1, 0);
    map.member_idx.resize(map.agg_of.size());
    for (int a : map.agg_of) {
        if (a < 0 || a >= map.n_aggregates)
            throw argument_error("aggregate index out of range");
        ++map.member_ptr[a + 1];
    }
    for (int i = 0; i < map.n_aggregates; ++i) map.member_ptr[i + 1] += map.member_ptr[i];
    std::vector<int> next(map.member_ptr.begin(), map.member_ptr.end() - 1);
    for (std::size_t j = 0; j < map.agg_of.size(); ++j)
        map.member_idx[next[map.agg_of[j]]++] = static_cast<int>(j);
}

} // namespace detail

/// Tight axis-aligned box around the point set.
inline AuxGrid bounding_box(std::span<const Point> coords) {
    if (coords.empty()) throw argument_error("bounding_box: no points");
    AuxGrid g;
    g.a1 = g.b1 = coords[0].x;
    g.a2 = g.b2 = coords[0].y;
    for (const Point& p : coords) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw argument_error("bounding_box: non-finite coordinate");
        g.a1 = std::min(g.a1, p.x);
        g.b1 = std::max(g.b1, p.x);
        g.a2 = std::min(g.a2, p.y);
        g.b2 = std::max(g.b2, p.y);
    }
    if (!(g.b1 > g.a1) || !(g.b2 > g.a2))
        throw geometry_error("bounding_box: degenerate point set");
    return g;
}

/// Largest L with 4^L < N. floor(log N / log 4) except at exact powers of 4,
/// where the strict inequality forces one level less.
inline int choose_depth(long n_dofs) {
    if (n_dofs < 4) throw argument_error("choose_depth: need at least 4 DoFs");
    int level = 0;
    long cells = 1;
    while (cells * 4 < n_dofs) {
        cells *= 4;
        ++level;
    }
    return level == 0 ? 1 : level;
}

/// Lexicographic cell index of (x,y) on level k. Normalized coordinates are
/// clamped to [0, 1) before scaling so the closed upper boundary lands in the
/// last cell instead of one past it.
inline int subregion_of_point(double x, double y, const AuxGrid& grid, int k) {
    if (!std::isfinite(x) || !std::isfinite(y) ||
        x < grid.a1 || x > grid.b1 || y < grid.a2 || y > grid.b2)
        throw geometry_error("point (" + std::to_string(x) + ", " + std::to_string(y) +
                             ") outside bounding box");
    const double w = static_cast<double>(grid.width(k));
    constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    const double sx = std::min((x - grid.a1) / (grid.b1 - grid.a1), below_one);
    const double sy = std::min((y - grid.a2) / (grid.b2 - grid.a2), below_one);
    const int t1 = static_cast<int>(sx * w);
    const int t2 = static_cast<int>(sy * w);
    return t2 * grid.width(k) + t1;
}

/// Bins every DoF into its level-L cell.
inline AggregationMap aggregate_finest(std::span<const Point> coords, const AuxGrid& grid) {
    AggregationMap map;
    map.level = grid.depth;
    map.n_aggregates = grid.cells(grid.depth);
    map.agg_of.resize(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j)
        map.agg_of[j] = subregion_of_point(coords[j].x, coords[j].y, grid, grid.depth);
    detail::build_members(map);
    return map;
}

/// Quadtree parent map for level k: cell (t1,t2) aggregates into
/// (t1/2, t2/2) on level k-1. Every coarse aggregate has exactly 4 members,
/// listed in child order SW, SE, NW, NE.
inline AggregationMap aggregate_coarse(int k) {
    if (k < 1) throw argument_error("aggregate_coarse: level must be >= 1");
    AggregationMap map;
    map.level = k;
    map.n_aggregates = 1 << (2 * (k - 1));
    const int w = 1 << k;
    map.agg_of.resize(static_cast<std::size_t>(w) * w);
    for (int t2 = 0; t2 < w; ++t2)
        for (int t1 = 0; t1 < w; ++t1)
            map.agg_of[static_cast<std::size_t>(t2) * w + t1] = (t2 / 2) * (w / 2) + t1 / 2;
    detail::build_members(map);
    return map;
}

/// Checkerboard-of-checkerboards color: safe for the 9-point stencil because
/// neighbors differ in t1 or t2 by exactly 1.
inline int color_of(int i, int k) {
    const int w = 1 << k;
    if (i < 0 || i >= w * w) throw argument_error("color_of: cell index out of range");
    const int t1 = i % w;
    const int t2 = i / w;
    return (t1 % 2) + 2 * (t2 % 2);
}

} // namespace auxamg

#endif // AUXAMG_AUXGRID_HPP
