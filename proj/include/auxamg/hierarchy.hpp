/// @file hierarchy.hpp
/// @brief Setup phase: aggregation-based coarse operators over the quadtree
///        levels, matrix-free transfers, and the assembled level stack.
///
/// Coarse operators are Galerkin products for the Boolean piecewise-constant
/// interpolation: (A_coarse)_{rq} = sum of a_ij over i in G_r, j in G_q. On
/// structured levels every aggregate is a 2x2 cell block, so the coarse
/// sparsity is again the 9-point stencil and the sum is a fixed gather. Cells
/// with no fine members stay in the index space as inactive identity rows.

#ifndef AUXAMG_HIERARCHY_HPP
#define AUXAMG_HIERARCHY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "auxgrid.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "smoother.hpp"
#include "sparse.hpp"

namespace auxamg {

struct SetupOptions {
    int coarsest_size = 64;        // stop coarsening once a level is this small
    bool strict_locality = false;  // fail instead of dropping non-stencil couplings
    bool lump_locality = false;    // fold non-stencil couplings into the diagonal
    double symmetry_tol = 1e-10;   // relative symmetry defect accepted at setup
};

/// What happened to couplings that fell outside the 9-point stencil.
struct LocalityReport {
    long dropped = 0;
    double dropped_mass = 0.0;   // sum |a_ij| over dropped entries
    long lumped = 0;
    double lumped_mass = 0.0;

    bool clean() const { return dropped == 0 && lumped == 0; }
};

namespace detail {

/// Neighbor offsets in stencil-slot order 1..8: E, NE, N, NW, W, SW, S, SE.
inline constexpr std::array<std::array<int, 2>, 8> stencil_offsets{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

/// Slot for tile offset (dx,dy), both in {-1,0,1}; -1 when out of stencil.
inline int stencil_slot(int dx, int dy) {
    if (dx < -1 || dx > 1 || dy < -1 || dy > 1) return -1;
    constexpr int table[9] = {6, 7, 8, 5, 0, 1, 4, 3, 2};
    return table[3 * (dy + 1) + (dx + 1)];
}

/// Level size of an aggregation target; validates it is a full quadtree level.
inline int quadtree_level_of(int n_cells) {
    int k = 0;
    while ((1 << (2 * k)) < n_cells) ++k;
    if ((1 << (2 * k)) != n_cells)
        throw argument_error("aggregate count " + std::to_string(n_cells) +
                             " is not a power of 4");
    return k;
}

} // namespace detail

/// 9-point stencil pattern for level k, as the column-major col_idx array of
/// an EllMatrix on 4^k cells. Slot 0 is the diagonal; slots 1..8 follow the
/// fixed neighbor order E, NE, N, NW, W, SW, S, SE with -1 where a neighbor
/// falls off the grid.
inline std::vector<int> build_stencil_indices(int k) {
    const int w = 1 << k;
    const int n = w * w;
    std::vector<int> col_idx(static_cast<std::size_t>(n) * 9, EllMatrix::padding);
    for (int i = 0; i < n; ++i) {
        const int t1 = i % w;
        const int t2 = i / w;
        col_idx[i] = i;
        for (int s = 0; s < 8; ++s) {
            const int u1 = t1 + detail::stencil_offsets[s][0];
            const int u2 = t2 + detail::stencil_offsets[s][1];
            if (u1 < 0 || u1 >= w || u2 < 0 || u2 >= w) continue;
            col_idx[static_cast<std::size_t>(s + 1) * n + i] = u2 * w + u1;
        }
    }
    return col_idx;
}

/// Active flags straight from aggregate membership (finest aggregation).
inline std::vector<std::uint8_t> active_from_members(const AggregationMap& agg) {
    std::vector<std::uint8_t> active(agg.n_aggregates);
    for (int i = 0; i < agg.n_aggregates; ++i) active[i] = !agg.members(i).empty();
    return active;
}

/// A coarse cell is active when any of its children is.
inline std::vector<std::uint8_t> coarsen_active(const AggregationMap& agg,
                                                std::span<const std::uint8_t> fine_active) {
    if (static_cast<int>(fine_active.size()) != static_cast<int>(agg.agg_of.size()))
        throw size_error("coarsen_active: flag count does not match map");
    std::vector<std::uint8_t> active(agg.n_aggregates, 0);
    for (std::size_t j = 0; j < agg.agg_of.size(); ++j)
        if (fine_active[j]) active[agg.agg_of[j]] = 1;
    return active;
}

struct AssembledLevel {
    EllMatrix op;
    std::vector<std::uint8_t> active;
    LocalityReport locality;
};

namespace detail {

/// Presets the fixed 9-point pattern with zero values on active rows and an
/// identity row on inactive ones.
inline EllMatrix preset_stencil(int k, std::span<const std::uint8_t> active) {
    const int n = 1 << (2 * k);
    EllMatrix op(n, 9);
    op.col_idx = build_stencil_indices(k);
    for (int r = 0; r < n; ++r) {
        if (active[r]) continue;
        for (int t = 1; t < 9; ++t) op.col(r, t) = EllMatrix::padding;
        op.val(r, 0) = 1.0;
    }
    return op;
}

} // namespace detail

/// Galerkin coarse operator for the finest (CSR) system: gathers, per coarse
/// row r, the sums sum_{i in G_r} sum_{j in G_q} a_ij into the 9-point slots.
/// Couplings between non-neighboring cells (possible only when the mesh is
/// wildly irregular relative to the cell size) are dropped and reported, or
/// lumped / rejected per the options. Empty aggregates become inactive
/// identity rows.
inline AssembledLevel assemble_coarse_finest(const CsrMatrix& A, const AggregationMap& agg,
                                             const SetupOptions& opts = {}) {
    if (static_cast<int>(agg.agg_of.size()) != A.n_rows)
        throw size_error("assemble_coarse_finest: map does not match matrix");
    const int k = detail::quadtree_level_of(agg.n_aggregates);
    const int w = 1 << k;
    const int n = agg.n_aggregates;

    AssembledLevel out;
    out.active = active_from_members(agg);
    out.op = detail::preset_stencil(k, out.active);
    EllMatrix& op = out.op;

    std::vector<long> row_dropped(n, 0);
    std::vector<double> row_dropped_mass(n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t rr) {
        const int r = static_cast<int>(rr);
        if (!out.active[r]) return;
        const int t1 = r % w;
        const int t2 = r / w;
        for (int i : agg.members(r)) {
            for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
                const double a = A.values[p];
                const int q = agg.agg_of[A.col_idx[p]];
                const int slot = detail::stencil_slot(q % w - t1, q / w - t2);
                if (slot < 0) {
                    if (opts.lump_locality && !opts.strict_locality) {
                        op.val(r, 0) += a;
                    }
                    ++row_dropped[r];
                    row_dropped_mass[r] += std::abs(a);
                    continue;
                }
                op.val(r, slot) += a;
            }
        }
    });
    for (int r = 0; r < n; ++r) {
        if (row_dropped[r] == 0) continue;
        if (opts.lump_locality && !opts.strict_locality) {
            out.locality.lumped += row_dropped[r];
            out.locality.lumped_mass += row_dropped_mass[r];
        } else {
            out.locality.dropped += row_dropped[r];
            out.locality.dropped_mass += row_dropped_mass[r];
        }
    }
    if (opts.strict_locality && out.locality.dropped > 0)
        throw structure_error("strict locality: " + std::to_string(out.locality.dropped) +
                              " couplings fall outside the 9-point stencil");
    return out;
}

/// Galerkin coarse operator between structured levels: each coarse cell sums
/// the rows of its four children. Quadtree nesting keeps every child coupling
/// inside the coarse 9-point stencil, so this never drops entries. Inactive
/// children are identity padding and are excluded from the sums.
inline EllMatrix assemble_coarse_structured(const EllMatrix& A_next, const AggregationMap& agg,
                                            std::span<const std::uint8_t> active_next) {
    if (static_cast<int>(agg.agg_of.size()) != A_next.n_rows ||
        static_cast<int>(active_next.size()) != A_next.n_rows)
        throw size_error("assemble_coarse_structured: map does not match operator");
    const int kc = detail::quadtree_level_of(agg.n_aggregates);
    const int wc = 1 << kc;

    const std::vector<std::uint8_t> active = coarsen_active(agg, active_next);
    EllMatrix op = detail::preset_stencil(kc, active);

    std::vector<std::uint8_t> overflow(agg.n_aggregates, 0);
    parallel_for(static_cast<std::size_t>(agg.n_aggregates), [&](std::size_t rr) {
        const int r = static_cast<int>(rr);
        if (!active[r]) return;
        const int t1 = r % wc;
        const int t2 = r / wc;
        for (int i : agg.members(r)) {
            if (!active_next[i]) continue;
            for (int t = 0; t < A_next.width; ++t) {
                const int j = A_next.col(i, t);
                if (j == EllMatrix::padding) continue;
                const int q = agg.agg_of[j];
                const int slot = detail::stencil_slot(q % wc - t1, q / wc - t2);
                if (slot < 0) {
                    overflow[r] = 1;
                    continue;
                }
                op.val(r, slot) += A_next.val(i, t);
            }
        }
    });
    for (int r = 0; r < agg.n_aggregates; ++r)
        if (overflow[r])
            throw structure_error("4-child coarsening escaped the 9-point stencil at row " +
                                  std::to_string(r));
    return op;
}

/// Dense Galerkin product P^t A P for an arbitrary partition; the reference
/// container when aggregates have no stencil structure.
inline DenseMatrix galerkin_dense(const CsrMatrix& A, const AggregationMap& agg) {
    if (static_cast<int>(agg.agg_of.size()) != A.n_rows)
        throw size_error("galerkin_dense: map does not match matrix");
    DenseMatrix C(agg.n_aggregates, agg.n_aggregates);
    for (int i = 0; i < A.n_rows; ++i)
        for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
            C(agg.agg_of[i], agg.agg_of[A.col_idx[p]]) += A.values[p];
    return C;
}

/// Piecewise-constant interpolation: every fine DoF copies its aggregate's
/// coarse value.
inline void prolongate(std::span<const double> coarse, const AggregationMap& agg,
                       std::span<double> fine) {
    if (static_cast<int>(coarse.size()) != agg.n_aggregates ||
        fine.size() != agg.agg_of.size())
        throw size_error("prolongate: vector sizes do not match map");
    parallel_for(fine.size(), [&](std::size_t j) { fine[j] = coarse[agg.agg_of[j]]; });
}

inline std::vector<double> prolongate(std::span<const double> coarse, const AggregationMap& agg) {
    std::vector<double> fine(agg.agg_of.size());
    prolongate(coarse, agg, fine);
    return fine;
}

/// Transpose of prolongate: coarse entry i sums its members; empty aggregates
/// receive 0.
inline void restrict(std::span<const double> fine, const AggregationMap& agg,
                     std::span<double> coarse) {
    if (static_cast<int>(coarse.size()) != agg.n_aggregates ||
        fine.size() != agg.agg_of.size())
        throw size_error("restrict: vector sizes do not match map");
    parallel_for(static_cast<std::size_t>(agg.n_aggregates), [&](std::size_t i) {
        double sum = 0.0;
        for (int j : agg.members(static_cast<int>(i))) sum += fine[j];
        coarse[i] = sum;
    });
}

inline std::vector<double> restrict(std::span<const double> fine, const AggregationMap& agg) {
    std::vector<double> coarse(static_cast<std::size_t>(agg.n_aggregates));
    restrict(fine, agg, coarse);
    return coarse;
}

/// One member of the level stack. The finest level keeps the user's CSR
/// matrix and smooths by aggregate blocks; structured levels hold 9-point
/// ELL operators and smooth pointwise.
struct Level {
    int k = 0;                         // quadtree level; the finest system is depth+1
    bool structured = false;
    int n = 0;
    CsrMatrix csr;                     // finest only
    EllMatrix ell;                     // structured levels
    AggregationMap to_coarser;         // empty on the coarsest retained level
    std::vector<std::uint8_t> active;
    ColorSchedule schedule;            // blocks on the finest level, cells otherwise
    BlockFactors blocks;               // finest only
    long nnz = 0;
};

struct Hierarchy {
    AuxGrid grid;
    std::vector<Level> levels;   // finest first, strictly decreasing sizes
    LuFactors coarsest;          // dense factorization of levels.back()
    LocalityReport locality;
    SetupOptions options;

    int n_levels() const { return static_cast<int>(levels.size()); }
};

/// Builds the full solver state for an SPD system with DoF coordinates:
/// bounding box and depth, finest aggregation and block factors, the level-L
/// operator, structured coarsening down to coarsest_size, colors per level,
/// and the dense coarsest factorization.
inline Hierarchy setup_hierarchy(const CsrMatrix& A, std::span<const Point> coords,
                                 SetupOptions opts = {}) {
    if (A.n_rows != A.n_cols) throw size_error("setup_hierarchy: matrix not square");
    if (static_cast<int>(coords.size()) != A.n_rows)
        throw size_error("setup_hierarchy: coordinate count does not match matrix order");
    validate_csr(A);
    for (int r = 0; r < A.n_rows; ++r)
        if (A.at(r, r) <= 0.0)
            throw definiteness_error("nonpositive diagonal at row " + std::to_string(r));
    if (symmetry_defect(A) > opts.symmetry_tol)
        throw structure_error("matrix is not symmetric to tolerance");
    opts.coarsest_size = std::max(opts.coarsest_size, 4);

    Hierarchy h;
    h.options = opts;
    const int n = A.n_rows;

    Level fine;
    fine.structured = false;
    fine.n = n;
    fine.csr = A;
    fine.nnz = A.nnz();
    fine.active.assign(static_cast<std::size_t>(n), 1);

    if (n <= opts.coarsest_size) {
        fine.k = 0;
        h.coarsest = lu_factor(dense_from_csr(A));
        h.levels.push_back(std::move(fine));
        return h;
    }

    h.grid = bounding_box(coords);
    h.grid.depth = choose_depth(n);
    const int depth = h.grid.depth;
    fine.k = depth + 1;
    fine.to_coarser = aggregate_finest(coords, h.grid);
    fine.blocks = factor_blocks(A, fine.to_coarser);

    AssembledLevel top = assemble_coarse_finest(A, fine.to_coarser, opts);
    h.locality = top.locality;
    fine.schedule = make_schedule(depth, top.active);
    h.levels.push_back(std::move(fine));

    Level cur;
    cur.k = depth;
    cur.structured = true;
    cur.n = 1 << (2 * depth);
    cur.ell = std::move(top.op);
    cur.active = std::move(top.active);
    cur.schedule = make_schedule(depth, cur.active);

    while (cur.k > 0 && cur.n > opts.coarsest_size) {
        const int k = cur.k;
        cur.to_coarser = aggregate_coarse(k);
        EllMatrix next = assemble_coarse_structured(cur.ell, cur.to_coarser, cur.active);
        std::vector<std::uint8_t> next_active = coarsen_active(cur.to_coarser, cur.active);
        cur.nnz = cur.ell.nnz();
        h.levels.push_back(std::move(cur));

        cur = Level{};
        cur.k = k - 1;
        cur.structured = true;
        cur.n = 1 << (2 * (k - 1));
        cur.ell = std::move(next);
        cur.active = std::move(next_active);
        cur.schedule = make_schedule(k - 1, cur.active);
    }
    cur.nnz = cur.ell.nnz();
    h.coarsest = lu_factor(dense_from_ell(cur.ell));
    h.levels.push_back(std::move(cur));
    return h;
}

struct HierarchyStats {
    int levels = 0;
    std::vector<long> sizes;
    std::vector<long> nnz;
    double operator_complexity = 1.0;
};

inline HierarchyStats stats(const Hierarchy& h) {
    HierarchyStats s;
    s.levels = h.n_levels();
    long total = 0;
    for (const Level& level : h.levels) {
        s.sizes.push_back(level.n);
        s.nnz.push_back(level.nnz);
        total += level.nnz;
    }
    s.operator_complexity = static_cast<double>(total) / static_cast<double>(h.levels.front().nnz);
    return s;
}

} // namespace auxamg

#endif // AUXAMG_HIERARCHY_HPP
