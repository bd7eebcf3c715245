/// @file smoother.hpp
/// @brief 4-color Gauss-Seidel relaxation: point sweeps on structured levels,
///        block sweeps (aggregates as blocks) on the finest level.
///
/// Colors come from the quadtree tiling, not from a coloring algorithm: cell
/// (t1,t2) gets color (t1 mod 2) + 2*(t2 mod 2), which separates all 9-point
/// neighbors. A sweep processes colors 0,1,2,3 in order; the transposed sweep
/// runs 3,2,1,0. Rows within a color never couple, so they update in parallel
/// and any schedule reproduces the sequential result bit for bit.

#ifndef AUXAMG_SMOOTHER_HPP
#define AUXAMG_SMOOTHER_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "auxgrid.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "sparse.hpp"

namespace auxamg {

enum class SweepDirection { forward, transposed };

/// Per-level color classes. groups[c] lists the active cells (or blocks) of
/// color c in ascending index order; inactive items appear in no group.
struct ColorSchedule {
    std::array<std::vector<int>, 4> groups;
    std::vector<int> item_color;   // color per item, -1 for inactive

    int n_items() const { return static_cast<int>(item_color.size()); }
};

/// Builds the quadtree color classes for level k, skipping inactive items.
/// Items are cells on structured levels and aggregates (= level-L cells) for
/// the finest block smoother.
inline ColorSchedule make_schedule(int k, std::span<const std::uint8_t> active) {
    const int n = 1 << (2 * k);
    if (static_cast<int>(active.size()) != n)
        throw size_error("make_schedule: active flags do not match 4^k items");
    ColorSchedule s;
    s.item_color.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        const int c = color_of(i, k);
        s.item_color[i] = c;
        s.groups[c].push_back(i);
    }
    return s;
}

namespace detail {

inline std::array<int, 4> color_order(SweepDirection dir) {
    return dir == SweepDirection::forward ? std::array<int, 4>{0, 1, 2, 3}
                                          : std::array<int, 4>{3, 2, 1, 0};
}

} // namespace detail

/// One 4-color point Gauss-Seidel sweep on an ELL operator, in place:
/// x_i <- (b_i - sum_{j != i} a_ij x_j) / a_ii, colors in sweep order,
/// rows within a color simultaneously.
inline void point_gs_sweep(const EllMatrix& A, std::span<const double> b, std::span<double> x,
                           const ColorSchedule& schedule, SweepDirection dir) {
    if (static_cast<int>(b.size()) != A.n_rows || static_cast<int>(x.size()) != A.n_rows ||
        schedule.n_items() != A.n_rows)
        throw size_error("point_gs_sweep: sizes do not match operator");
    for (const auto& group : schedule.groups)
        for (int i : group)
            if (A.val(i, 0) == 0.0)
                throw singular_error("zero diagonal at row " + std::to_string(i));
    for (int c : detail::color_order(dir)) {
        const auto& rows = schedule.groups[c];
        parallel_for(rows.size(), [&](std::size_t idx) {
            const int i = rows[idx];
            double sum = b[i];
            for (int t = 1; t < A.width; ++t) {
                const int j = A.col(i, t);
                if (j != EllMatrix::padding) sum -= A.val(i, t) * x[j];
            }
            x[i] = sum / A.val(i, 0);
        });
    }
}

/// Point sweep on CSR storage; the singleton-block path of block_gs_sweep
/// reproduces this update bit for bit, so both share the row loop shape:
/// skip the diagonal while accumulating in storage order, divide last.
inline void point_gs_sweep(const CsrMatrix& A, std::span<const double> b, std::span<double> x,
                           const ColorSchedule& schedule, SweepDirection dir) {
    if (static_cast<int>(b.size()) != A.n_rows || static_cast<int>(x.size()) != A.n_rows ||
        schedule.n_items() != A.n_rows)
        throw size_error("point_gs_sweep: sizes do not match operator");
    for (const auto& group : schedule.groups)
        for (int i : group)
            if (A.at(i, i) == 0.0)
                throw singular_error("zero diagonal at row " + std::to_string(i));
    for (int c : detail::color_order(dir)) {
        const auto& rows = schedule.groups[c];
        parallel_for(rows.size(), [&](std::size_t idx) {
            const int i = rows[idx];
            double diag = 0.0;
            double sum = b[i];
            for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
                const int j = A.col_idx[p];
                if (j == i)
                    diag = A.values[p];
                else
                    sum -= A.values[p] * x[j];
            }
            x[i] = sum / diag;
        });
    }
}

/// Dense LU factors of the per-aggregate principal submatrices.
struct BlockFactors {
    std::vector<LuFactors> factors;   // indexed by aggregate id; empty blocks hold no data
    std::vector<int> block_size;      // member count per aggregate
};

/// Extracts and factors A restricted to each non-empty aggregate. Aggregate
/// members are sorted ascending, so column lookup is a binary search.
inline BlockFactors factor_blocks(const CsrMatrix& A, const AggregationMap& agg) {
    if (static_cast<int>(agg.agg_of.size()) != A.n_rows)
        throw size_error("factor_blocks: aggregation map does not match matrix");
    BlockFactors out;
    out.factors.resize(agg.n_aggregates);
    out.block_size.resize(agg.n_aggregates);
    for (int g = 0; g < agg.n_aggregates; ++g) {
        const auto members = agg.members(g);
        const int s = static_cast<int>(members.size());
        out.block_size[g] = s;
        if (s == 0) continue;
        DenseMatrix block(s, s);
        for (int q = 0; q < s; ++q) {
            const int i = members[q];
            for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
                const auto it = std::lower_bound(members.begin(), members.end(), A.col_idx[p]);
                if (it != members.end() && *it == A.col_idx[p])
                    block(q, static_cast<int>(it - members.begin())) = A.values[p];
            }
        }
        try {
            out.factors[g] = lu_factor(std::move(block));
        } catch (const singular_error&) {
            throw definiteness_error("aggregate " + std::to_string(g) + " has a singular block");
        }
    }
    return out;
}

/// One 4-color block Gauss-Seidel sweep, in place. Per color, every block of
/// that color solves A|G * delta = (b - A x)|G against the same residual
/// snapshot and adds delta to its own x slice. Singleton blocks use the
/// point-GS division directly.
inline void block_gs_sweep(const CsrMatrix& A, const BlockFactors& factors,
                           const AggregationMap& agg, std::span<const double> b,
                           std::span<double> x, const ColorSchedule& schedule,
                           SweepDirection dir) {
    if (static_cast<int>(b.size()) != A.n_rows || static_cast<int>(x.size()) != A.n_rows)
        throw size_error("block_gs_sweep: sizes do not match operator");
    if (schedule.n_items() != agg.n_aggregates)
        throw size_error("block_gs_sweep: schedule does not match aggregate count");
    std::vector<double> x_prev(x.size());
    for (int c : detail::color_order(dir)) {
        const auto& blocks = schedule.groups[c];
        if (blocks.empty()) continue;
        std::copy(x.begin(), x.end(), x_prev.begin());
        parallel_for(blocks.size(), [&](std::size_t idx) {
            const int g = blocks[idx];
            const auto members = agg.members(g);
            if (members.size() == 1) {
                const int i = members[0];
                double diag = 0.0;
                double sum = b[i];
                for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
                    const int j = A.col_idx[p];
                    if (j == i)
                        diag = A.values[p];
                    else
                        sum -= A.values[p] * x_prev[j];
                }
                x[i] = sum / diag;
                return;
            }
            const int s = static_cast<int>(members.size());
            std::vector<double> r(s), delta(s);
            for (int q = 0; q < s; ++q) {
                const int i = members[q];
                double sum = b[i];
                for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
                    sum -= A.values[p] * x_prev[A.col_idx[p]];
                r[q] = sum;
            }
            factors.factors[g].solve(r, delta);
            for (int q = 0; q < s; ++q) x[members[q]] = x_prev[members[q]] + delta[q];
        });
    }
}

/// A nonzero coupling two distinct same-color blocks. Advisory: such entries
/// turn the within-color update into a simultaneous (Jacobi-like) one, which
/// is still a valid smoother because updates read a per-color snapshot.
struct ColorViolation {
    int row;
    int col;
    int block_row;
    int block_col;
};

inline std::vector<ColorViolation> check_color_locality(const CsrMatrix& A,
                                                        const AggregationMap& agg,
                                                        const ColorSchedule& schedule) {
    std::vector<ColorViolation> out;
    for (int i = 0; i < A.n_rows; ++i) {
        const int gi = agg.agg_of[i];
        for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
            if (A.values[p] == 0.0) continue;
            const int gj = agg.agg_of[A.col_idx[p]];
            if (gi != gj && schedule.item_color[gi] == schedule.item_color[gj])
                out.push_back({i, A.col_idx[p], gi, gj});
        }
    }
    return out;
}

} // namespace auxamg

#endif // AUXAMG_SMOOTHER_HPP
