#pragma once

#include <stdexcept>
#include <string>

namespace sdkex {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments to an operation (n = 0, mismatched platform instances, ...).
struct ParamError : Error {
    using Error::Error;
};

// Malformed bytes received from a peer or read from disk.
struct WireError : Error {
    using Error::Error;
};

// Operation invoked in a session phase that does not permit it.
struct PhaseError : Error {
    using Error::Error;
};

// Transport-level failure (connect, timeout, short read).
struct TransportError : Error {
    using Error::Error;
};

// A sampler ran out of retries.
struct SamplingError : Error {
    using Error::Error;
};

} // namespace sdkex
