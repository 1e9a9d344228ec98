#pragma once

#include <stdexcept>
#include <string>

namespace crspec {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory { validation = 1, resource = 2, numeric = 3, acceptance = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

// Result not representable in double precision.
class RangeError : public Error {
public:
    explicit RangeError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

// Violated precondition on user-supplied input (configs, points, ladders).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

// Refusal to allocate beyond a configured budget.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ErrorCategory::resource, what) {}
};

// Model data that does not describe a valid spectrum (e.g. a Hilbert polynomial
// taking a non-integer value).
class ModelValidityError : public Error {
public:
    explicit ModelValidityError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

}  // namespace crspec
