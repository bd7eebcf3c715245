// Test-side oracles. Everything here recomputes a quantity through an
// independent dense or sequential path so the library can be checked
// against it. Eigen is used only in the tests, never by the library.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "auxamg/auxamg.hpp"

namespace oracles {

inline Eigen::MatrixXd to_eigen(const auxamg::CsrMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n_rows, a.n_cols);
    for (int r = 0; r < a.n_rows; ++r)
        for (int t = a.row_ptr[r]; t < a.row_ptr[r + 1]; ++t)
            m(r, a.col_idx[t]) += a.values[t];
    return m;
}

inline Eigen::MatrixXd to_eigen(const auxamg::EllMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n_rows, a.n_rows);
    for (int r = 0; r < a.n_rows; ++r)
        for (int t = 0; t < a.width; ++t) {
            const int c = a.col(r, t);
            if (c >= 0) m(r, c) += a.val(r, t);
        }
    return m;
}

inline Eigen::MatrixXd to_eigen(const auxamg::DenseMatrix& a) {
    Eigen::MatrixXd m(a.n_rows, a.n_cols);
    for (int r = 0; r < a.n_rows; ++r)
        for (int c = 0; c < a.n_cols; ++c) m(r, c) = a(r, c);
    return m;
}

// Boolean prolongation as a dense matrix, one unit entry per fine row.
inline Eigen::MatrixXd boolean_p(const auxamg::AggregationMap& agg) {
    const int n_fine = static_cast<int>(agg.agg_of.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_fine, agg.n_aggregates);
    for (int j = 0; j < n_fine; ++j) p(j, agg.agg_of[j]) = 1.0;
    return p;
}

inline Eigen::MatrixXd galerkin_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p) {
    return p.transpose() * a * p;
}

// Sparse-times-boolean triple product without Eigen: accumulates A*P
// column-wise from the CSR entries, then sums fine rows per aggregate.
// Used where the fine matrix is too large for a dense product.
inline std::vector<std::vector<double>> galerkin_sparse(const auxamg::CsrMatrix& a,
                                                        const auxamg::AggregationMap& agg) {
    const std::size_t nc = static_cast<std::size_t>(agg.n_aggregates);
    std::vector<std::vector<double>> ap(static_cast<std::size_t>(a.n_rows),
                                        std::vector<double>(nc, 0.0));
    for (int r = 0; r < a.n_rows; ++r)
        for (int t = a.row_ptr[r]; t < a.row_ptr[r + 1]; ++t)
            ap[static_cast<std::size_t>(r)][static_cast<std::size_t>(agg.agg_of[a.col_idx[t]])] +=
                a.values[t];
    std::vector<std::vector<double>> coarse(nc, std::vector<double>(nc, 0.0));
    for (int r = 0; r < a.n_rows; ++r) {
        const std::size_t cr = static_cast<std::size_t>(agg.agg_of[r]);
        for (std::size_t q = 0; q < nc; ++q) coarse[cr][q] += ap[static_cast<std::size_t>(r)][q];
    }
    return coarse;
}

inline Eigen::VectorXd to_eigen_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_eigen_vec(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::vector<double> dense_solve(const Eigen::MatrixXd& a, const std::vector<double>& b) {
    Eigen::VectorXd x = a.fullPivLu().solve(to_eigen_vec(b));
    return from_eigen_vec(x);
}

// One Gauss-Seidel sweep applied sequentially in an explicit row order.
// Same per-row update formula as the library sweep, so a colored sweep
// must reproduce it bitwise when the ordering lists colors in sequence.
inline void sequential_gs(const auxamg::EllMatrix& a, const std::vector<double>& b,
                          std::vector<double>& x, const std::vector<int>& order) {
    for (const int i : order) {
        double sum = b[static_cast<std::size_t>(i)];
        for (int t = 1; t < a.width; ++t) {
            const int c = a.col(i, t);
            if (c >= 0) sum -= a.val(i, t) * x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(i)] = sum / a.val(i, 0);
    }
}

inline void sequential_gs(const auxamg::CsrMatrix& a, const std::vector<double>& b,
                          std::vector<double>& x, const std::vector<int>& order) {
    for (const int i : order) {
        double sum = b[static_cast<std::size_t>(i)];
        double diag = 0.0;
        for (int t = a.row_ptr[i]; t < a.row_ptr[i + 1]; ++t) {
            const int c = a.col_idx[t];
            if (c == i)
                diag = a.values[t];
            else
                sum -= a.values[t] * x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(i)] = sum / diag;
    }
}

// Row order that visits colors 0..3 in sequence, ascending inside each.
inline std::vector<int> color_order(const auxamg::ColorSchedule& sched) {
    std::vector<int> order;
    for (const auto& group : sched.groups) order.insert(order.end(), group.begin(), group.end());
    return order;
}

// Textbook preconditioned CG with a fixed SPD preconditioner, used to
// cross-check the flexible variant when the preconditioner is linear.
struct CgTrace {
    std::vector<std::vector<double>> iterates;
    std::vector<double> residuals;
};

template <typename MatVec, typename Precond>
CgTrace textbook_pcg(std::size_t n, MatVec&& matvec, Precond&& precond,
                     const std::vector<double>& b, std::size_t n_steps) {
    CgTrace trace;
    std::vector<double> u(n, 0.0), r = b, z(n), p(n), ap(n);
    trace.iterates.push_back(u);
    trace.residuals.push_back(auxamg::norm2(r));
    precond(r, z);
    p = z;
    double rz = auxamg::dot(r, z);
    for (std::size_t j = 0; j < n_steps; ++j) {
        matvec(p, ap);
        const double papp = auxamg::dot(p, ap);
        if (papp <= 0.0) break;
        const double alpha = rz / papp;
        auxamg::axpy(alpha, p, u);
        auxamg::axpy(-alpha, ap, r);
        trace.iterates.push_back(u);
        trace.residuals.push_back(auxamg::norm2(r));
        precond(r, z);
        const double rz_next = auxamg::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return trace;
}

// One colored block Gauss-Seidel sweep computed densely: per color, the
// update for every block in that color is evaluated from the same frozen
// iterate, then applied.
inline void dense_block_gs(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           Eigen::VectorXd& x, const auxamg::AggregationMap& agg,
                           const auxamg::ColorSchedule& sched) {
    for (const auto& group : sched.groups) {
        const Eigen::VectorXd frozen = x;
        for (const int blk : group) {
            const auto members = agg.members(blk);
            const Eigen::Index m = static_cast<Eigen::Index>(members.size());
            if (m == 0) continue;
            Eigen::MatrixXd abb(m, m);
            Eigen::VectorXd res(m);
            for (Eigen::Index p = 0; p < m; ++p) {
                const int row = members[static_cast<std::size_t>(p)];
                res(p) = b(row) - a.row(row).dot(frozen);
                for (Eigen::Index q = 0; q < m; ++q)
                    abb(p, q) = a(row, members[static_cast<std::size_t>(q)]);
            }
            const Eigen::VectorXd delta = abb.fullPivLu().solve(res);
            for (Eigen::Index p = 0; p < m; ++p) {
                const int row = members[static_cast<std::size_t>(p)];
                x(row) = frozen(row) + delta(p);
            }
        }
    }
}

inline double a_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
    return std::sqrt(v.dot(a * v));
}

}  // namespace oracles
