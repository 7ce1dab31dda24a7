#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mev {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated operation precondition (bad range, mismatched block number, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Transport-level RPC failure (unreachable, timeout, malformed response). Retriable.
class RpcError : public Error {
public:
    using Error::Error;
};

/// The node answered with a JSON-RPC error object.
class RpcResponseError : public RpcError {
public:
    RpcResponseError(int code, const std::string& message)
        : RpcError("rpc error " + std::to_string(code) + ": " + message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

class BlockNotFound : public Error {
public:
    explicit BlockNotFound(std::uint64_t number)
        : Error("block " + std::to_string(number) + " not found"), number_(number) {}
    std::uint64_t number() const { return number_; }

private:
    std::uint64_t number_;
};

/// A block fetch failed after retries; carries the block number so callers can resume.
class FetchError : public Error {
public:
    FetchError(std::uint64_t number, const std::string& cause)
        : Error("block " + std::to_string(number) + " failed: " + cause), number_(number) {}
    std::uint64_t block_number() const { return number_; }

private:
    std::uint64_t number_;
};

class FixtureError : public Error {
public:
    FixtureError(std::size_t line, const std::string& message)
        : Error("fixture line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// A structurally valid swap whose amounts do not describe a single direction.
class MalformedSwap : public DecodeError {
public:
    using DecodeError::DecodeError;
};

class StorageError : public Error {
public:
    using Error::Error;
};

}  // namespace mev
