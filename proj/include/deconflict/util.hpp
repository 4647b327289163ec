#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace deconflict {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (CSV rows, QUBO files, JSON configs).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A solver guard was exceeded (instance too large for the requested method).
class GuardError : public Error {
public:
    using Error::Error;
};

/// Ordinary least squares y = slope*x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    int n = 0;
};

/// Fit a line through (x, y). Requires at least two distinct x values;
/// returns nullopt otherwise. slope_stderr is 0 when there are no residual
/// degrees of freedom (n <= 2).
std::optional<LinearFit> least_squares(std::span<const double> x,
                                       std::span<const double> y);

/// Worker cap: DECONFLICT_THREADS if set and positive, else
/// hardware_concurrency (at least 1).
int max_threads();

/// Run fn(i) for i in [0, count). Uses up to max_threads() workers; the
/// callable must be safe to invoke concurrently for distinct indices.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace deconflict
