#pragma once

#include <stdexcept>
#include <string>

namespace tofsim {

/// Bad input or configuration. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be read or written. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace tofsim
