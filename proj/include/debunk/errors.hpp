#pragma once

#include <stdexcept>
#include <string>

namespace debunk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid user input (corpus lines, CLI arguments, config).
class InputError : public Error {
public:
    using Error::Error;
};

/// A phase was started without the output of the phase it depends on.
class MissingPrerequisite : public Error {
public:
    using Error::Error;
};

/// A run artifact (store, analysis JSON) exists but cannot be read back.
class MalformedArtifact : public Error {
public:
    using Error::Error;
};

/// Reading or writing a run store failed; aborts the phase.
class StoreIoError : public Error {
public:
    using Error::Error;
};

// Backend failures. Transient ones are retried by the client, the rest surface.
class BackendError : public Error {
public:
    using Error::Error;
};

class TransientError : public BackendError {
public:
    using BackendError::BackendError;
};

class FatalBackendError : public BackendError {
public:
    using BackendError::BackendError;
};

class EmptyCompletion : public BackendError {
public:
    using BackendError::BackendError;
};

/// Transient failures persisted past the configured retry cap.
class BackendExhausted : public BackendError {
public:
    BackendExhausted(const std::string& what, int attempts)
        : BackendError(what), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

class EmptyAfterSanitize : public Error {
public:
    using Error::Error;
};

class MissingVerdict : public Error {
public:
    using Error::Error;
};

class ScoreParseError : public Error {
public:
    enum class Kind { Unparseable, OutOfRange };
    ScoreParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace debunk
