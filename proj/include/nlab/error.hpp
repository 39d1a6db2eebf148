#pragma once

#include <stdexcept>
#include <string>

namespace nlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's precondition.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain where a quantity is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A tail or truncated integral failed to converge.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// The finite-energy hypothesis failed at the coarsest ladder level.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An estimator produced a non-finite value or variance.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidParameter(what);
}

}  // namespace nlab
