#pragma once

#include <stdexcept>
#include <string>

namespace lhv {

// Raised when an input violates a documented precondition.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a problem exceeds the supported size (e.g. exact oracle m > 22).
struct SizeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a numeric subroutine fails to converge or exceeds its budget.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an internal invariant that should hold by construction fails.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Raised on malformed files; the message names the offending field or record.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on checkpoint load problems (bad magic, version, checksum, truncation).
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lhv
