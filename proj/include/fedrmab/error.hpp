#pragma once

#include <stdexcept>
#include <string>

namespace fedrmab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments to a library call (precondition violated by the caller).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Experiment configuration failed validation or could not be parsed.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Transport or protocol failure in networked federation.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Federation protocol violated by a peer (bad message, hash mismatch, ...).
class ProtocolError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

}  // namespace fedrmab
