#pragma once

#include <stdexcept>

namespace sphkura {

/// Invalid user configuration (bad flag, key or value). CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solver produced NaN or infinity. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphkura
