#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ctlqr {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible with the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or precondition supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data matrices fail a rank or consistency requirement.
class DataError : public Error {
public:
    using Error::Error;
};

/// A matrix that must be Hurwitz (or a gain that must be stabilizing) is not.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// A vectorized linear system is numerically singular.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Internal consistency guard tripped, e.g. a block expected to be symmetric is not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Dense kernel failed to converge (eigenvalue iteration, SVD).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Randomized generator ran out of redraws.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// The virtual pair could not be stabilized.
class StabilizationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver stalled above tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual,
                     double condition = std::numeric_limits<double>::quiet_NaN())
        : Error(what), last_residual_(last_residual), condition_(condition) {}

    double last_residual() const noexcept { return last_residual_; }
    /// cond(Z_eta) when the failure came out of the learner, NaN otherwise.
    double condition() const noexcept { return condition_; }

private:
    double last_residual_;
    double condition_;
};

}  // namespace ctlqr
