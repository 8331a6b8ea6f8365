#pragma once

#include <stdexcept>
#include <string>

namespace marketgeo {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: broken CSV/JSON structure, unparseable numbers or dates.
class ParseError : public Error {
public:
    using Error::Error;
};

// Input parsed fine but violates a content contract (duplicate dates,
// non-positive prices, too little history, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A stock whose returns are constant inside a window; carries the ticker.
class DegenerateAssetError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Baseline period unusable: out of range, fewer than two valid windows, ...
class CalibrationError : public Error {
public:
    using Error::Error;
};

// Baseline windows all produced the same kurtosis, so no scale to measure against.
class DegenerateBaselineError : public CalibrationError {
public:
    using CalibrationError::CalibrationError;
};

// Numerical integrity failure: negative radicand, non-Euclidean Gram matrix, ...
class NumericalError : public Error {
public:
    using Error::Error;
};

// Scatter matrix too ill-conditioned to invert for the Mahalanobis form.
class SingularCovarianceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Bad analysis parameters (window shorter than the subspace needs, alpha
// outside (0,1), nonsensical thread counts, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace marketgeo
