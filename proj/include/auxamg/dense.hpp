/// @file dense.hpp
/// @brief Small dense matrices and an LU direct solve for the coarsest level.

#ifndef AUXAMG_DENSE_HPP
#define AUXAMG_DENSE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "sparse.hpp"

namespace auxamg {

/// Row-major dense matrix.
struct DenseMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : n_rows(rows), n_cols(cols), data(static_cast<std::size_t>(rows) * cols, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * n_cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * n_cols + c]; }
};

inline DenseMatrix dense_from_csr(const CsrMatrix& A) {
    DenseMatrix D(A.n_rows, A.n_cols);
    for (int r = 0; r < A.n_rows; ++r)
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
            D(r, A.col_idx[p]) = A.values[p];
    return D;
}

inline DenseMatrix dense_from_ell(const EllMatrix& A) {
    DenseMatrix D(A.n_rows, A.n_rows);
    for (int r = 0; r < A.n_rows; ++r)
        for (int t = 0; t < A.width; ++t)
            if (A.col(r, t) != EllMatrix::padding) D(r, A.col(r, t)) = A.val(r, t);
    return D;
}

/// LU factorization with partial pivoting, stored in place.
struct LuFactors {
    DenseMatrix lu;
    std::vector<int> perm;

    void solve(std::span<const double> b, std::span<double> x) const {
        const int n = lu.n_rows;
        if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
            throw size_error("lu solve: vector length does not match factorization");
        for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (int i = 1; i < n; ++i) {
            double sum = x[i];
            for (int j = 0; j < i; ++j) sum -= lu(i, j) * x[j];
            x[i] = sum;
        }
        for (int i = n - 1; i >= 0; --i) {
            double sum = x[i];
            for (int j = i + 1; j < n; ++j) sum -= lu(i, j) * x[j];
            x[i] = sum / lu(i, i);
        }
    }

    std::vector<double> solve(std::span<const double> b) const {
        std::vector<double> x(b.size());
        solve(b, x);
        return x;
    }
};

inline LuFactors lu_factor(DenseMatrix A) {
    if (A.n_rows != A.n_cols) throw size_error("lu_factor: matrix not square");
    const int n = A.n_rows;
    LuFactors f;
    f.perm.resize(n);
    for (int i = 0; i < n; ++i) f.perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double m = std::abs(A(r, k));
            if (m > best) { best = m; piv = r; }
        }
        if (best == 0.0) throw singular_error("lu_factor: zero pivot at column " + std::to_string(k));
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(A(k, c), A(piv, c));
            std::swap(f.perm[k], f.perm[piv]);
        }
        for (int r = k + 1; r < n; ++r) {
            const double m = A(r, k) / A(k, k);
            A(r, k) = m;
            for (int c = k + 1; c < n; ++c) A(r, c) -= m * A(k, c);
        }
    }
    f.lu = std::move(A);
    return f;
}

} // namespace auxamg

#endif // AUXAMG_DENSE_HPP
