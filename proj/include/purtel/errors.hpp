// errors.hpp: exception types shared by every purtel module

#pragma once

#include <stdexcept>
#include <string>

namespace purtel {

/// Operand dimensions do not fit together (mismatched dims, bad subsystem lists).
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value violates a documented precondition (non-Hermitian input, bad parameter, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A requested construction would exceed the configured size limit.
struct SizingError : std::length_error {
    using std::length_error::length_error;
};

/// An index lies outside [0, d).
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace purtel
