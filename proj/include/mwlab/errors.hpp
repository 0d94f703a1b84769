#pragma once

#include <stdexcept>
#include <string>

namespace mwlab {

/// Base class for all errors raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameters (CLI maps this to exit code 2).
struct config_error : error {
    using error::error;
};

/// Numeric failure inside a computation (CLI maps this to exit code 3).
struct numeric_error : error {
    using error::error;
};

}  // namespace mwlab
