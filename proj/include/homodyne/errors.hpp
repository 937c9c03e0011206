#ifndef HOMODYNE_ERRORS_HPP
#define HOMODYNE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace homodyne {

// Base of all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or parameter values (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Numeric-regime failures: the requested computation is outside the
// domain where the formulas are stable/integrable (CLI exit code 3).
struct NumericError : Error {
    using Error::Error;
};

// File and serialization failures (CLI exit code 4).
struct IoError : Error {
    using Error::Error;
};

struct TailNotNegligible : NumericError {
    using NumericError::NumericError;
};
struct Divergent : NumericError {
    using NumericError::NumericError;
};
struct MassDeficit : NumericError {
    using NumericError::NumericError;
};
struct NegativeDensity : NumericError {
    using NumericError::NumericError;
};
struct TooFewSamples : NumericError {
    using NumericError::NumericError;
};
struct TooManySamples : NumericError {
    using NumericError::NumericError;
};
struct UnstableKernel : NumericError {
    using NumericError::NumericError;
};
struct SampleTooSmall : NumericError {
    using NumericError::NumericError;
};
struct DegenerateBoundary : NumericError {
    using NumericError::NumericError;
};
struct NonIntegrable : NumericError {
    using NumericError::NumericError;
};
struct NegativeVariance : NumericError {
    using NumericError::NumericError;
};
struct IterateCollapse : NumericError {
    using NumericError::NumericError;
};
struct InsufficientPoints : NumericError {
    using NumericError::NumericError;
};
struct MalformedRow : IoError {
    using IoError::IoError;
};

} // namespace homodyne

#endif
