#pragma once

#include <stdexcept>
#include <string>

namespace pace {

// Error taxonomy. The CLI maps these onto exit codes, everything else
// just lets them propagate.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/axis mismatch between tensors.
struct DimensionError : Error {
    using Error::Error;
};

// A precondition of an operation was violated.
struct ContractError : Error {
    using Error::Error;
};

// Bad configuration (unknown key, invalid value, wrong sample rate).
struct ConfigError : Error {
    using Error::Error;
};

// A required artifact (checkpoint, dataset) is missing.
struct DependencyError : Error {
    using Error::Error;
};

// Operation requires state the object does not have (e.g. untrained model).
struct StateError : Error {
    using Error::Error;
};

// Unreadable or unsupported file content.
struct FormatError : Error {
    using Error::Error;
};

// Out-of-range index (embedding id, code index).
struct IndexError : Error {
    using Error::Error;
};

}  // namespace pace
