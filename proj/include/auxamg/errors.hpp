/// @file errors.hpp
/// @brief Exception hierarchy shared by all auxamg components.

#ifndef AUXAMG_ERRORS_HPP
#define AUXAMG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace auxamg {

/// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix dimension mismatch.
class size_error : public error {
public:
    using error::error;
};

/// A fixed-width container cannot hold the requested entries.
class capacity_error : public error {
public:
    using error::error;
};

/// Matrix violates a structural requirement (missing diagonal, nonsymmetric, ...).
class structure_error : public error {
public:
    using error::error;
};

/// Invalid argument value (empty input, out-of-range index, ...).
class argument_error : public error {
public:
    using error::error;
};

/// Geometric precondition violated (degenerate box, point outside domain, ...).
class geometry_error : public error {
public:
    using error::error;
};

/// Matrix is not positive definite where the algorithm requires it.
class definiteness_error : public error {
public:
    using error::error;
};

/// A smoother or factorization hit a zero pivot at apply time.
class singular_error : public error {
public:
    using error::error;
};

/// File could not be read or written.
class io_error : public error {
public:
    using error::error;
};

/// Malformed input file; carries the offending 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& what, long line)
        : error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

} // namespace auxamg

#endif // AUXAMG_ERRORS_HPP
