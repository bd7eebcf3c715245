/// @file parallel.hpp
/// @brief Fork-join kernels with a determinism contract: results are
///        bit-identical for any worker count.
///
/// Row-parallel loops only ever write disjoint outputs, so any partition of
/// the index range reproduces the sequential result exactly. Reductions use a
/// fixed blocking (independent of the worker count) combined by a fixed-shape
/// pairwise tree, so dot products are schedule-independent as well.

#ifndef AUXAMG_PARALLEL_HPP
#define AUXAMG_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace auxamg {

namespace detail {

inline std::atomic<int>& thread_count() {
    static std::atomic<int> count{1};
    return count;
}

/// Reduction block length. Fixed so the partial-sum tree has the same shape
/// no matter how many workers execute the blocks.
inline constexpr std::size_t reduce_block = 1024;

/// Below this many elements a loop runs inline; spawning threads costs more
/// than it saves. Partition-independent results make the cutoff safe.
inline constexpr std::size_t spawn_threshold = 8192;

} // namespace detail

/// Sets the worker count used by all kernels (clamped to >= 1).
inline void set_num_threads(int n) {
    detail::thread_count().store(n < 1 ? 1 : n, std::memory_order_relaxed);
}

inline int num_threads() {
    return detail::thread_count().load(std::memory_order_relaxed);
}

/// Runs body(i) for i in [0, n). Bodies must write only state owned by
/// index i; under that contract every schedule equals the sequential loop.
/// The first exception thrown by any slab is rethrown after all join.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const int workers = num_threads();
    if (workers <= 1 || n < detail::spawn_threshold) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t slabs = static_cast<std::size_t>(workers);
    const std::size_t chunk = (n + slabs - 1) / slabs;
    std::vector<std::thread> pool;
    pool.reserve(slabs - 1);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run_slab = [&](std::size_t lo, std::size_t hi) noexcept {
        try {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    for (std::size_t s = 1; s < slabs; ++s) {
        const std::size_t lo = std::min(n, s * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &run_slab] { run_slab(lo, hi); });
    }
    run_slab(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Deterministic Euclidean inner product: fixed 1024-element block sums
/// reduced by a pairwise tree whose shape depends only on the length.
inline double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t nblocks = (n + detail::reduce_block - 1) / detail::reduce_block;
    if (nblocks <= 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    std::vector<double> partial(nblocks);
    parallel_for(nblocks, [&](std::size_t blk) {
        const std::size_t lo = blk * detail::reduce_block;
        const std::size_t hi = std::min(n, lo + detail::reduce_block);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        partial[blk] = s;
    });
    std::size_t m = nblocks;
    while (m > 1) {
        const std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) partial[i] = partial[2 * i] + partial[2 * i + 1];
        if (m % 2 == 1) partial[half] = partial[m - 1];
        m = half + m % 2;
    }
    return partial[0];
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    parallel_for(x.size(), [&](std::size_t i) { y[i] += alpha * x[i]; });
}

} // namespace auxamg

#endif // AUXAMG_PARALLEL_HPP
