#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlss {

/// Raised when an argument violates an operation's precondition
/// (negative density, nonpositive midpoint value, mismatched grids, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the linear solvers when a pivot falls below the singularity threshold.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, std::size_t pivot)
        : std::runtime_error(what + " (pivot index " + std::to_string(pivot) + ")"), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

} // namespace dlss
