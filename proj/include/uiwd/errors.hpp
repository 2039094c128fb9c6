#pragma once

#include <stdexcept>
#include <string>

namespace uiwd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A unit price of zero (or less) makes a residual solve meaningless.
class DegenerateBudgetError : public Error {
public:
    using Error::Error;
};

/// An operation was called with inputs that violate its contract.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The regressor carries no variation, so the EIS slope is not identified.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration could not be parsed or failed validation.
///
/// `where()` is either "line N" (syntax errors) or a dotted field path.
class ConfigError : public Error {
public:
    ConfigError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace uiwd
