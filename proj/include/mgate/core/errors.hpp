#pragma once

#include <stdexcept>

namespace mgate {

/// Grid or frame dimensions do not match what the operation requires.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A configuration file or value is invalid; the message carries the field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A detector backend failed to load or execute.
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mgate
