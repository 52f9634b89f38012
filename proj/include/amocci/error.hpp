#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace amocci {

/// Malformed or unusable input data (unreadable file, non-numeric line, too short).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The limit-law grid was too narrow: too many argmax draws landed near ±T.
class BoundaryHitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An interval cannot be formed, e.g. the estimated shift is exactly zero.
class UndefinedIntervalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid study configuration. keys() lists every offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& message, std::vector<std::string> keys)
        : std::invalid_argument(message), keys_(std::move(keys)) {}

    [[nodiscard]] const std::vector<std::string>& keys() const noexcept { return keys_; }

private:
    std::vector<std::string> keys_;
};

}  // namespace amocci
