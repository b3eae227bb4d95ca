#pragma once

#include <stdexcept>
#include <string>

namespace proofflow {

/// Root of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Malformed input text or JSON (graph, dataset, artifact files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Bad command-line or provider configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Infrastructure failures: a backend could not be reached or misbehaved.
/// Distinct from mathematical failure (a proof that does not compile).
class BackendError : public Error {
public:
    using Error::Error;
};

class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

class HttpStatusError : public BackendError {
public:
    HttpStatusError(int status, const std::string& what)
        : BackendError(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class MalformedPayloadError : public BackendError {
public:
    using BackendError::BackendError;
};

class TimeoutError : public BackendError {
public:
    using BackendError::BackendError;
};

/// The fixture provider has no recorded response for a request.
class FixtureMissingError : public BackendError {
public:
    FixtureMissingError(const std::string& hash, const std::string& what)
        : BackendError(what), hash_(hash) {}
    const std::string& request_hash() const noexcept { return hash_; }

private:
    std::string hash_;
};

}  // namespace proofflow
