#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tether {

/// Invalid input or violated precondition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration problem (unknown key, missing key, out-of-range value).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A solver hit a numerical failure (CFL violation, NaN, ...).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::int64_t step = -1)
        : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

}  // namespace tether
