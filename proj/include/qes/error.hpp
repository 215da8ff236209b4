#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base class for every error raised by the library. Carries a short
/// machine-readable category next to the human-readable message.
class Error : public std::runtime_error
{
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category))
    {
    }

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

/// Raised when the inputs of an operation violate its preconditions.
class InvalidArgument : public Error
{
public:
    explicit InvalidArgument(const std::string& message) : Error("invalid_argument", message) {}
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public Error
{
public:
    explicit NumericalError(const std::string& message) : Error("numerical", message) {}
};

} // namespace qes
