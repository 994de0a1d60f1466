#pragma once

#include <stdexcept>
#include <string>

namespace qtlpower {

/// Argument outside the mathematical or configuration domain of an operation.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative numeric routine failed to reach its accuracy target.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qtlpower
