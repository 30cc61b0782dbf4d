#pragma once

#include <stdexcept>
#include <string>

namespace rough {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A 3-increment handed to the grid sewing inverse is not in the kernel of delta.
struct NotClosed : Error {
    using Error::Error;
};

/// A delay is not an integer multiple of the grid step.
struct DelayNotOnGrid : Error {
    using Error::Error;
};

/// A shifted grid index falls outside the (extended) grid.
struct OutOfRange : Error {
    using Error::Error;
};

/// Delay pair (v1, v2) with v1 + v2 < 0.
struct InadmissiblePair : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Solver state left the floating-point range.
struct NonFinite : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    NoConvergence(const std::string& what, int iters, double last_dist)
        : Error(what), iterations(iters), last_distance(last_dist) {}
    int iterations;
    double last_distance;
};

/// A delayed coefficient requires history before -r_q.
struct HistoryGap : Error {
    using Error::Error;
};

/// A (v1, v2) family is absent from the delayed lift.
struct MissingLiftFamily : Error {
    using Error::Error;
};

/// Neither the circulant embedding nor the covariance factorization produced a sample.
struct EmbeddingFailed : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rough
