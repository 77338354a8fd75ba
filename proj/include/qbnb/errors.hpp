#pragma once

#include <stdexcept>
#include <string>

namespace qbnb {

// Common base so callers can catch any toolkit error in one handler.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Interval evaluation left the domain of an operation (division by an
// interval containing zero, sqrt of an interval dipping below zero), or an
// input fails a precondition.
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// A bounding rule needs a Lipschitz-type constant the problem does not carry.
struct MissingConstant : Error {
    explicit MissingConstant(const std::string& what) : Error(what) {}
};

// A bounding rule needs a derivative oracle the problem does not carry.
struct MissingOracle : Error {
    explicit MissingOracle(const std::string& what) : Error(what) {}
};

// A rule that is only valid under the unconstrained-minimum assumption was
// applied to a problem not asserting it.
struct ConstraintViolation : Error {
    explicit ConstraintViolation(const std::string& what) : Error(what) {}
};

// Expression text could not be parsed.
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace qbnb
