#pragma once

#include <stdexcept>
#include <string>

namespace csem {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is structurally valid but degenerate (empty matrix, too few columns, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Matrix / vector dimensions do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A CSE set, remainder matrix or compressed form contradicts itself
/// (already-zero cell referenced, overlapping cell coverage, missing weight).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Malformed container or array layout: bad magic, bad version, truncated
/// stream, pointer arrays out of order, out-of-range indices, short records.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Signed integer overflow detected inside a multiply kernel.
class OverflowError : public Error {
public:
    using Error::Error;
};

} // namespace csem
