#pragma once

#include <stdexcept>
#include <string>

namespace flrwn {

// Argument-level failures map to std::invalid_argument so callers can catch
// the whole family; numerical failures map to std::runtime_error.

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Grid too coarse for the requested basis.
struct ResolutionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A design or class description violates its own invariants.
struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The design functions are numerically linearly dependent.
struct DegenerateDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace flrwn
