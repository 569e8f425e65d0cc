#pragma once

#include <stdexcept>
#include <string>

namespace elcoinv {

/// Base class for all toolkit failures that map to CLI exit statuses.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad keys, values, combinations).
struct ConfigError : Error {
    using Error::Error;
};

/// Degenerate or inadmissible geometry: nonpositive radius, vanishing tangent,
/// intersecting/too-close curves, coincident kernel points, source on the boundary.
struct GeometryError : Error {
    using Error::Error;
};

/// Discrepancy principle cannot be satisfied (noise level at or above the data norm).
struct MorozovError : Error {
    using Error::Error;
};

/// Newton-stage failures: iterate left the admissible region, unusable least-squares
/// system, or unidentifiable impedance (field numerically zero on the missing arc).
struct IterationError : Error {
    using Error::Error;
};

} // namespace elcoinv
