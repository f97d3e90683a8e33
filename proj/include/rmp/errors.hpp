#pragma once

#include <stdexcept>
#include <string>

namespace rmp {

/// Numerical routine failed to meet its tolerance (non-convergence, eigensolver failure).
struct NumericFailure : std::runtime_error {
    explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured combinatorial or size bound was exceeded.
struct ResourceLimit : std::runtime_error {
    explicit ResourceLimit(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem output failed.
struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rmp
