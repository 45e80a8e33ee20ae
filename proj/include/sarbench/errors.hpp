#pragma once

#include <stdexcept>
#include <string>

namespace sarbench {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a type invariant (non-finite pixel, size mismatch, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Dataset directory does not follow the expected tree.
class LayoutError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (scene, features, benchmark).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input cannot support the requested computation (e.g. k > distinct values).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A metric is not defined for the given labels (single class, no positives).
class MetricUndefinedError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Failure inside a benchmark stage; the message is prefixed with "[stage] ".
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace sarbench
