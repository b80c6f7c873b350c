#pragma once

#include <stdexcept>
#include <string>

namespace noma {

// Argument outside the mathematical domain of an operation (u >= 1 for a
// quantile, L_s > L, n * alpha <= 2 for a cumulant, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid scenario or sweep description. `key()` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// A numerical integral failed to reach its tolerance within the subdivision
// budget. Carries the error estimate that was achieved.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what + " (achieved error " + std::to_string(error_estimate) + ")"),
          value_(value), error_estimate_(error_estimate) {}

    double value() const noexcept { return value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double value_;
    double error_estimate_;
};

}  // namespace noma
