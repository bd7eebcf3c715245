/// @file matrix_market.hpp
/// @brief Matrix Market coordinate I/O (real, general or symmetric, 1-based).
///
/// Symmetric files store one triangle; reading expands the off-diagonal
/// entries so the returned CSR holds the full matrix. Writing always emits
/// `general` with maximum-precision decimals, so read(write(A)) returns the
/// entry set of A bit-exactly.

#ifndef AUXAMG_MATRIX_MARKET_HPP
#define AUXAMG_MATRIX_MARKET_HPP

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sparse.hpp"

namespace auxamg {

namespace detail {

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

inline CsrMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) throw parse_error("empty file", 1);
    ++line_no;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || detail::lower(object) != "matrix")
        throw parse_error("not a Matrix Market matrix file", line_no);
    if (detail::lower(format) != "coordinate")
        throw parse_error("only coordinate format is supported", line_no);
    if (detail::lower(field) != "real")
        throw parse_error("only real-valued matrices are supported", line_no);
    const std::string sym = detail::lower(symmetry);
    if (sym != "general" && sym != "symmetric")
        throw parse_error("symmetry must be general or symmetric", line_no);

    // Size line: first non-comment, non-blank line after the banner.
    long n_rows = 0, n_cols = 0, nnz = 0;
    for (;;) {
        if (!std::getline(in, line)) throw parse_error("missing size line", line_no);
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sizes(line);
        if (!(sizes >> n_rows >> n_cols >> nnz) || n_rows < 0 || n_cols < 0 || nnz < 0)
            throw parse_error("malformed size line", line_no);
        break;
    }

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(sym == "symmetric" ? 2 * nnz : nnz));
    long seen = 0;
    while (seen < nnz) {
        if (!std::getline(in, line))
            throw parse_error("file ends after " + std::to_string(seen) + " of " +
                                  std::to_string(nnz) + " entries",
                              line_no);
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream entry(line);
        long r = 0, c = 0;
        double v = 0.0;
        if (!(entry >> r >> c >> v)) throw parse_error("malformed entry", line_no);
        if (r < 1 || r > n_rows || c < 1 || c > n_cols)
            throw parse_error("index out of range (indices are 1-based)", line_no);
        entries.push_back({static_cast<int>(r - 1), static_cast<int>(c - 1), v});
        if (sym == "symmetric" && r != c)
            entries.push_back({static_cast<int>(c - 1), static_cast<int>(r - 1), v});
        ++seen;
    }
    return csr_from_triplets(static_cast<int>(n_rows), static_cast<int>(n_cols), std::move(entries));
}

inline void write_matrix_market(const CsrMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.n_rows << ' ' << A.n_cols << ' ' << A.nnz() << '\n';
    char buf[64];
    for (int r = 0; r < A.n_rows; ++r) {
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
            std::snprintf(buf, sizeof buf, "%.17g", A.values[p]);
            out << (r + 1) << ' ' << (A.col_idx[p] + 1) << ' ' << buf << '\n';
        }
    }
    if (!out) throw io_error("write to " + path + " failed");
}

} // namespace auxamg

#endif // AUXAMG_MATRIX_MARKET_HPP
