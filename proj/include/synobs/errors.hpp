#pragma once

#include <stdexcept>
#include <string>

namespace synobs {

/// Raised when arguments from different groups or manifolds are mixed, or a
/// dimension does not match.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value. `key()` names the offending setting.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// The bracket closure loop hit its dimension budget. Either the generated
/// algebra is infinite dimensional or the budget was too small; the two cases
/// cannot be told apart numerically.
class NonClosureError : public std::runtime_error {
public:
    NonClosureError(int budget, int reached, const std::string& what)
        : std::runtime_error(what), budget_(budget), reached_(reached) {}

    int budget() const { return budget_; }
    int reached() const { return reached_; }

private:
    int budget_;
    int reached_;
};

}  // namespace synobs
