#pragma once

#include <stdexcept>
#include <string>

namespace parisi {

/// Raised when inputs violate a documented precondition (bad config,
/// mismatched dimensions, malformed CDF levels, ...). Maps to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a computation fails numerically (non-PSD covariance
/// increment, eigensolver breakdown, inconsistent dual-route check, ...).
/// Maps to exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace parisi
