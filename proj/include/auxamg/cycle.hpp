/// @file cycle.hpp
/// @brief Solve phase: nonlinear PCG, the recursive AMLI K-cycle, and the
///        outer preconditioned solver loop.
///
/// The K-cycle accelerates each coarse-grid correction with a few steps of
/// nonlinear (flexible) PCG whose preconditioner is the next-coarser cycle.
/// Because that preconditioner changes from step to step, new search
/// directions are orthogonalized against all previous ones instead of relying
/// on the classical one-term recurrence. Every A-inner product reuses the one
/// operator application cached per direction.

#ifndef AUXAMG_CYCLE_HPP
#define AUXAMG_CYCLE_HPP

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "errors.hpp"
#include "hierarchy.hpp"
#include "parallel.hpp"
#include "smoother.hpp"
#include "sparse.hpp"

namespace auxamg {

struct CycleOptions {
    int n_inner = 2;          // PCG steps per coarse-grid correction
    int pre_sweeps = 1;
    int post_sweeps = 1;
    int max_outer = 100;
    double rtol = 1e-6;       // outer stop: ||r|| / ||b|| <= rtol
    int max_directions = 0;   // orthogonalization window; 0 keeps all
};

inline void validate(const CycleOptions& o) {
    if (o.n_inner < 1 || o.pre_sweeps < 1 || o.post_sweeps < 1 || o.max_outer < 1)
        throw argument_error("cycle options must be positive");
    if (!(o.rtol > 0.0) || !(o.rtol < 1.0))
        throw argument_error("rtol must lie in (0,1)");
    if (o.max_directions < 0) throw argument_error("max_directions must be >= 0");
}

struct SolveResult {
    std::vector<double> u;
    std::vector<double> residual_history;   // ||r||_2 per iteration, length iterations+1
    int iterations = 0;
    bool converged = false;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
};

namespace detail {

/// Direction store for flexible PCG: p, the cached A*p, and (p,p)_A.
struct DirectionWindow {
    std::deque<std::vector<double>> p;
    std::deque<std::vector<double>> ap;
    std::deque<double> energy;
    int capacity = 0;   // 0 = unbounded

    void push(std::vector<double>&& pi, std::vector<double>&& api, double e) {
        p.push_back(std::move(pi));
        ap.push_back(std::move(api));
        energy.push_back(e);
        if (capacity > 0 && static_cast<int>(p.size()) > capacity) {
            p.pop_front();
            ap.pop_front();
            energy.pop_front();
        }
    }
};

inline constexpr double breakdown_energy = 1e-300;

/// Builds the next direction from the preconditioned residual z: subtracts
/// the A-projection onto every kept direction, then appends the result with
/// its cached operator image Az + sum(beta * Ap_j). Returns (p,p)_A, or a
/// nonpositive value on breakdown.
inline double next_direction(DirectionWindow& dirs, std::vector<double>&& z,
                             std::vector<double>&& az) {
    std::vector<double> p = std::move(z);
    std::vector<double> ap = std::move(az);
    for (std::size_t j = 0; j < dirs.p.size(); ++j) {
        const double beta = -dot(p, dirs.ap[j]) / dirs.energy[j];
        axpy(beta, dirs.p[j], p);
        axpy(beta, dirs.ap[j], ap);
    }
    const double energy = dot(p, ap);
    if (!(energy > breakdown_energy)) return 0.0;
    dirs.push(std::move(p), std::move(ap), energy);
    return energy;
}

} // namespace detail

/// Runs n steps of nonlinear PCG for A u = f from u = 0, with a possibly
/// nonlinear preconditioner. apply_a and precond map a const input span to an
/// output span of the same length. Breakdown (zero-energy direction) returns
/// the current iterate.
template <class ApplyA, class Precond>
void nonlinear_pcg(ApplyA&& apply_a, Precond&& precond, std::span<const double> f, int n,
                   std::span<double> u, int max_directions = 0) {
    if (u.size() != f.size()) throw size_error("nonlinear_pcg: solution size mismatch");
    if (n < 1) throw argument_error("nonlinear_pcg: need at least one step");
    const std::size_t m = f.size();
    std::fill(u.begin(), u.end(), 0.0);
    std::vector<double> r(f.begin(), f.end());

    detail::DirectionWindow dirs;
    dirs.capacity = max_directions;
    for (int i = 0; i < n; ++i) {
        std::vector<double> z(m), az(m);
        precond(std::span<const double>(r), std::span<double>(z));
        apply_a(std::span<const double>(z), std::span<double>(az));
        const double energy = detail::next_direction(dirs, std::move(z), std::move(az));
        if (energy == 0.0) return;
        const std::vector<double>& p = dirs.p.back();
        const std::vector<double>& ap = dirs.ap.back();
        const double alpha = dot(r, p) / energy;
        axpy(alpha, p, u);
        axpy(-alpha, ap, r);
    }
}

namespace detail {

inline void apply_level(const Level& lv, std::span<const double> x, std::span<double> y) {
    if (lv.structured)
        ell_spmv(lv.ell, x, y);
    else
        csr_spmv(lv.csr, x, y);
}

inline void smooth_level(const Level& lv, std::span<const double> b, std::span<double> x,
                         int sweeps, SweepDirection dir) {
    for (int s = 0; s < sweeps; ++s) {
        if (lv.structured)
            point_gs_sweep(lv.ell, b, x, lv.schedule, dir);
        else
            block_gs_sweep(lv.csr, lv.blocks, lv.to_coarser, b, x, lv.schedule, dir);
    }
}

} // namespace detail

/// Direct solve at the coarsest retained level.
inline void coarsest_solve(const LuFactors& factors, std::span<const double> f,
                           std::span<double> u) {
    factors.solve(f, u);
}

/// One application of the level preconditioner u = B[f]: pre-smooth from
/// zero, correct through n_inner PCG steps on the restricted residual with
/// the next-coarser cycle as preconditioner, post-smooth with the transposed
/// (color-reversed) sweep. The coarsest level solves directly.
inline void amli_cycle(const Hierarchy& h, int level_idx, std::span<const double> f,
                       std::span<double> u, const CycleOptions& opts) {
    const Level& lv = h.levels[level_idx];
    if (static_cast<int>(f.size()) != lv.n || u.size() != f.size())
        throw size_error("amli_cycle: vector sizes do not match level");
    if (level_idx == h.n_levels() - 1) {
        coarsest_solve(h.coarsest, f, u);
        return;
    }
    std::fill(u.begin(), u.end(), 0.0);
    detail::smooth_level(lv, f, u, opts.pre_sweeps, SweepDirection::forward);

    std::vector<double> au(lv.n);
    detail::apply_level(lv, u, au);
    std::vector<double> r(lv.n);
    parallel_for(r.size(), [&](std::size_t i) { r[i] = f[i] - au[i]; });

    std::vector<double> rc = restrict(r, lv.to_coarser);
    std::vector<double> ec(rc.size());
    const Level& coarse = h.levels[level_idx + 1];
    nonlinear_pcg(
        [&](std::span<const double> x, std::span<double> y) { detail::apply_level(coarse, x, y); },
        [&](std::span<const double> x, std::span<double> y) {
            amli_cycle(h, level_idx + 1, x, y, opts);
        },
        rc, opts.n_inner, ec);

    // Scatter the correction into active rows only. Inactive rows carry no
    // DoFs; writing the parent's value there would re-enter the next residual
    // through the identity diagonal and pollute the restriction sums.
    const std::vector<double> correction = prolongate(ec, lv.to_coarser);
    parallel_for(u.size(), [&](std::size_t i) {
        if (lv.active[i]) u[i] += correction[i];
    });

    detail::smooth_level(lv, f, u, opts.post_sweeps, SweepDirection::transposed);
}

/// Outer flexible-PCG solve of A u = b preconditioned by the K-cycle.
/// Iterates until the 2-norm residual drops below rtol relative to ||b|| or
/// max_outer is reached; never throws on non-convergence.
inline SolveResult solve(const CsrMatrix& A, std::span<const double> b, const Hierarchy& h,
                         const CycleOptions& opts = {}) {
    validate(opts);
    if (static_cast<int>(b.size()) != A.n_rows)
        throw size_error("solve: right-hand side does not match matrix");
    if (h.levels.empty() || h.levels.front().n != A.n_rows)
        throw size_error("solve: hierarchy was built for a different order");

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    res.u.assign(b.size(), 0.0);
    const double norm_b = norm2(b);
    res.residual_history.push_back(norm_b);
    if (norm_b == 0.0) {
        res.converged = true;
        res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.total_seconds = res.solve_seconds;
        return res;
    }

    std::vector<double> r(b.begin(), b.end());
    detail::DirectionWindow dirs;
    dirs.capacity = opts.max_directions;
    while (res.iterations < opts.max_outer) {
        std::vector<double> z(r.size()), az(r.size());
        amli_cycle(h, 0, r, z, opts);
        csr_spmv(A, z, az);
        const double energy = detail::next_direction(dirs, std::move(z), std::move(az));
        if (energy == 0.0) break;
        const std::vector<double>& p = dirs.p.back();
        const std::vector<double>& ap = dirs.ap.back();
        const double alpha = dot(r, p) / energy;
        axpy(alpha, p, res.u);
        axpy(-alpha, ap, r);
        ++res.iterations;
        const double rn = norm2(r);
        res.residual_history.push_back(rn);
        if (rn <= opts.rtol * norm_b) {
            res.converged = true;
            break;
        }
    }
    res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.total_seconds = res.solve_seconds;
    return res;
}

} // namespace auxamg

#endif // AUXAMG_CYCLE_HPP
