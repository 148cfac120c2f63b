#pragma once
#include <stdexcept>
#include <string>

namespace equimesh {

// Error hierarchy used across the library. The CLI maps these to exit codes.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line(line) {}
    long line;
};

// Non-manifold connectivity, bad genus, or inconsistent orientation.
struct TopologyError : Error {
    using Error::Error;
};

// Zero-area face or a construction that collapses a triangle.
struct DegeneracyError : Error {
    using Error::Error;
};

// Evaluation at a pole of a function (angle at 0 or pi, log of 0).
struct SingularityError : Error {
    using Error::Error;
};

// Input point handed to a solver violates its feasibility precondition.
struct FeasibilityError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace equimesh
