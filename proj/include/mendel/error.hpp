#pragma once

#include <stdexcept>
#include <string>

namespace mendel {

/// Invalid parameters or run configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: step-size underflow, non-finite state, Newton divergence,
/// singular systems.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mendel
