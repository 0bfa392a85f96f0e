#pragma once

#include <stdexcept>
#include <string>

namespace amodelay {

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Instability, non-convergence or other numerical breakdown (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Complex or repeated characteristic speeds.
class DegenerateCharacteristics : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace amodelay
