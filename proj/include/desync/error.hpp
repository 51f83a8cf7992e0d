#pragma once

#include <stdexcept>
#include <string>

namespace desync {

/// Base class for all library failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A generator exhausted its acceptance/resample budget.
struct GenerationError : Error {
    using Error::Error;
};

/// Frequency denominators too close to zero for a control evaluation.
struct ResonanceError : Error {
    using Error::Error;
};

/// A linear-algebra routine hit a (near-)singular system.
struct NumericalError : Error {
    using Error::Error;
};

/// The integrator produced a non-finite state.
struct IntegrationError : Error {
    IntegrationError(const std::string& what, long step) : Error(what), step(step) {}
    long step;
};

/// File or stream level failure, with context where available.
struct IoError : Error {
    using Error::Error;
};

/// Malformed configuration or plan description.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace desync
