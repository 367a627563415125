#pragma once

#include <stdexcept>
#include <string>

namespace usct {

// Bad arguments, malformed configs, violated preconditions.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File and format problems (bad magic, truncated payload, unreadable path).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures that are not recoverable by the caller's inputs alone
// (solver blow-up, singular dense system). Non-convergence of the CBS
// iteration is *not* thrown; it is reported through SolveReport.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace usct
