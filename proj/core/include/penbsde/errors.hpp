#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace penbsde {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Thrown when the driver (or any data callback) returns a non-finite value.
class NumericDomainError : public Error {
public:
    NumericDomainError(std::size_t step, std::size_t node, const std::string& what)
        : Error(what + " at step " + std::to_string(step) + ", node " + std::to_string(node)),
          step_(step), node_(node) {}

    std::size_t step() const noexcept { return step_; }
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t step_;
    std::size_t node_;
};

/// Thrown by exhaustive oracles that refuse instances too large to enumerate.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace penbsde
