#pragma once

#include <stdexcept>
#include <string>

namespace fgsim {

/// Invalid parameter value (order out of range, bad index, malformed schedule...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of the operation (negative time, point off the grid).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Result not representable in double precision.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Too few samples for the requested finite-difference stencil.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dimension mismatch between grids, paths and coefficient arrays.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Hölder norms or other configuration-derived quantities are not finite.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iteration failed to converge although the contraction constant is below one.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ParameterError(what);
}

} // namespace detail

} // namespace fgsim
