/// @file sparse.hpp
/// @brief ELL and CSR sparse storage with the matrix-vector kernels built on them.
///
/// ELL holds every structured-level operator: fixed width, column-major
/// index/value arrays, the diagonal always in slot 0 so smoothers never
/// search for it. Padded slots carry column -1 and value 0. CSR holds the
/// one irregular matrix in a solve, the finest-level system.

#ifndef AUXAMG_SPARSE_HPP
#define AUXAMG_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace auxamg {

/// Fixed-width sparse matrix, column-major storage, diagonal first.
struct EllMatrix {
    static constexpr int padding = -1;

    int n_rows = 0;
    int width = 0;
    /// Logical slot (r,t) lives at flat offset t*n_rows + r in both arrays.
    std::vector<int> col_idx;
    std::vector<double> values;

    EllMatrix() = default;
    EllMatrix(int rows, int k)
        : n_rows(rows), width(k),
          col_idx(static_cast<std::size_t>(rows) * k, padding),
          values(static_cast<std::size_t>(rows) * k, 0.0) {}

    std::size_t slot(int r, int t) const {
        return static_cast<std::size_t>(t) * n_rows + r;
    }
    int col(int r, int t) const { return col_idx[slot(r, t)]; }
    double val(int r, int t) const { return values[slot(r, t)]; }
    int& col(int r, int t) { return col_idx[slot(r, t)]; }
    double& val(int r, int t) { return values[slot(r, t)]; }

    /// Stored (non-padding) entries.
    long nnz() const {
        long count = 0;
        for (int c : col_idx) count += (c != padding);
        return count;
    }
};

/// Compressed sparse row matrix; rows sorted by column index.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_ptr;   // length n_rows+1, nondecreasing
    std::vector<int> col_idx;
    std::vector<double> values;

    long nnz() const { return static_cast<long>(values.size()); }

    /// Value at (r,c), 0 when not stored. Binary search within the row.
    double at(int r, int c) const {
        const auto first = col_idx.begin() + row_ptr[r];
        const auto last = col_idx.begin() + row_ptr[r + 1];
        const auto it = std::lower_bound(first, last, c);
        if (it == last || *it != c) return 0.0;
        return values[static_cast<std::size_t>(it - col_idx.begin())];
    }
};

/// Verifies the EllMatrix invariants; throws structure_error on violation.
inline void validate_ell(const EllMatrix& A) {
    if (A.col_idx.size() != static_cast<std::size_t>(A.n_rows) * A.width ||
        A.values.size() != A.col_idx.size())
        throw structure_error("ELL arrays do not match n_rows*width");
    for (int r = 0; r < A.n_rows; ++r) {
        if (A.width < 1 || A.col(r, 0) != r)
            throw structure_error("ELL row " + std::to_string(r) + " does not store its diagonal in slot 0");
        for (int t = 0; t < A.width; ++t) {
            const int c = A.col(r, t);
            if (c == EllMatrix::padding) {
                if (A.val(r, t) != 0.0)
                    throw structure_error("padded ELL slot with nonzero value in row " + std::to_string(r));
                continue;
            }
            if (c < 0 || c >= A.n_rows)
                throw structure_error("ELL column index out of range in row " + std::to_string(r));
            for (int s = 0; s < t; ++s)
                if (A.col(r, s) == c)
                    throw structure_error("duplicate ELL column index in row " + std::to_string(r));
        }
    }
}

/// Verifies the CsrMatrix invariants; throws structure_error on violation.
inline void validate_csr(const CsrMatrix& A) {
    if (A.row_ptr.size() != static_cast<std::size_t>(A.n_rows) + 1)
        throw structure_error("CSR row_ptr length mismatch");
    if (A.row_ptr.front() != 0 || A.row_ptr.back() != static_cast<int>(A.values.size()))
        throw structure_error("CSR row_ptr endpoints inconsistent with nnz");
    for (int r = 0; r < A.n_rows; ++r) {
        if (A.row_ptr[r] > A.row_ptr[r + 1])
            throw structure_error("CSR row_ptr not nondecreasing at row " + std::to_string(r));
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
            if (A.col_idx[p] < 0 || A.col_idx[p] >= A.n_cols)
                throw structure_error("CSR column index out of range in row " + std::to_string(r));
            if (p > A.row_ptr[r] && A.col_idx[p - 1] >= A.col_idx[p])
                throw structure_error("CSR row " + std::to_string(r) + " not sorted by column");
        }
    }
}

/// y = A*x for ELL storage. Padded slots contribute nothing. x may be longer
/// than n_rows when the matrix is rectangular-by-construction.
inline void ell_spmv(const EllMatrix& A, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) < A.n_rows || static_cast<int>(y.size()) != A.n_rows)
        throw size_error("ell_spmv: vector length does not match matrix");
    parallel_for(static_cast<std::size_t>(A.n_rows), [&](std::size_t r) {
        const int row = static_cast<int>(r);
        double sum = 0.0;
        for (int t = 0; t < A.width; ++t) {
            const int c = A.col(row, t);
            if (c != EllMatrix::padding) sum += A.val(row, t) * x[c];
        }
        y[r] = sum;
    });
}

inline std::vector<double> ell_spmv(const EllMatrix& A, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(A.n_rows));
    ell_spmv(A, x, y);
    return y;
}

/// y = A*x for CSR storage.
inline void csr_spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != A.n_cols || static_cast<int>(y.size()) != A.n_rows)
        throw size_error("csr_spmv: vector length does not match matrix");
    parallel_for(static_cast<std::size_t>(A.n_rows), [&](std::size_t r) {
        double sum = 0.0;
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
            sum += A.values[p] * x[A.col_idx[p]];
        y[r] = sum;
    });
}

inline std::vector<double> csr_spmv(const CsrMatrix& A, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(A.n_rows));
    csr_spmv(A, x, y);
    return y;
}

/// Converts CSR to fixed-width ELL, moving each row's diagonal into slot 0
/// and keeping the remaining entries in CSR order.
inline EllMatrix csr_to_ell(const CsrMatrix& A, int width) {
    EllMatrix out(A.n_rows, width);
    for (int r = 0; r < A.n_rows; ++r) {
        const int len = A.row_ptr[r + 1] - A.row_ptr[r];
        if (len > width)
            throw capacity_error("row " + std::to_string(r) + " holds " + std::to_string(len) +
                                 " entries, ELL width is " + std::to_string(width));
        int diag_pos = -1;
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
            if (A.col_idx[p] == r) { diag_pos = p; break; }
        if (diag_pos < 0 || A.values[diag_pos] == 0.0)
            throw structure_error("row " + std::to_string(r) + " has no nonzero diagonal entry");
        out.col(r, 0) = r;
        out.val(r, 0) = A.values[diag_pos];
        int t = 1;
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
            if (p == diag_pos) continue;
            out.col(r, t) = A.col_idx[p];
            out.val(r, t) = A.values[p];
            ++t;
        }
    }
    return out;
}

/// One explicit (row, col, value) entry used while assembling a matrix.
struct Triplet {
    int row;
    int col;
    double value;
};

/// Builds CSR from unordered triplets; duplicates are summed.
inline CsrMatrix csr_from_triplets(int n_rows, int n_cols, std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix A;
    A.n_rows = n_rows;
    A.n_cols = n_cols;
    A.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col)
            sum += entries[j++].value;
        if (entries[i].row < 0 || entries[i].row >= n_rows || entries[i].col < 0 || entries[i].col >= n_cols)
            throw argument_error("triplet index out of range");
        A.col_idx.push_back(entries[i].col);
        A.values.push_back(sum);
        ++A.row_ptr[entries[i].row + 1];
        i = j;
    }
    for (int r = 0; r < n_rows; ++r) A.row_ptr[r + 1] += A.row_ptr[r];
    return A;
}

inline CsrMatrix csr_transpose(const CsrMatrix& A) {
    CsrMatrix T;
    T.n_rows = A.n_cols;
    T.n_cols = A.n_rows;
    T.row_ptr.assign(static_cast<std::size_t>(T.n_rows) + 1, 0);
    T.col_idx.resize(A.values.size());
    T.values.resize(A.values.size());
    for (int c : A.col_idx) ++T.row_ptr[c + 1];
    for (int r = 0; r < T.n_rows; ++r) T.row_ptr[r + 1] += T.row_ptr[r];
    std::vector<int> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
    for (int r = 0; r < A.n_rows; ++r) {
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
            const int pos = next[A.col_idx[p]]++;
            T.col_idx[pos] = r;
            T.values[pos] = A.values[p];
        }
    }
    return T;
}

/// max |A - A^t| / max(1, max |A|); 0 for an exactly symmetric matrix.
inline double symmetry_defect(const CsrMatrix& A) {
    if (A.n_rows != A.n_cols) return std::numeric_limits<double>::infinity();
    const CsrMatrix T = csr_transpose(A);
    double scale = 1.0;
    for (double v : A.values) scale = std::max(scale, std::abs(v));
    double defect = 0.0;
    for (int r = 0; r < A.n_rows; ++r) {
        int p = A.row_ptr[r], q = T.row_ptr[r];
        const int pe = A.row_ptr[r + 1], qe = T.row_ptr[r + 1];
        while (p < pe || q < qe) {
            const int ca = p < pe ? A.col_idx[p] : A.n_cols;
            const int cb = q < qe ? T.col_idx[q] : A.n_cols;
            if (ca < cb) {
                defect = std::max(defect, std::abs(A.values[p++]));
            } else if (cb < ca) {
                defect = std::max(defect, std::abs(T.values[q++]));
            } else {
                defect = std::max(defect, std::abs(A.values[p++] - T.values[q++]));
            }
        }
    }
    return defect / scale;
}

} // namespace auxamg

#endif // AUXAMG_SPARSE_HPP
