#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace perfun {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Domain violations during evaluation: ln/sqrt of a non-positive value, a vanishing
// denominator, derivative of sign() at 0.
class EvalError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Numerical failures raised by the integrators.
class NumericalError : public Error {
public:
    using Error::Error;
};

class StationaryPoint : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoReturn : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RegionExit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegrandBlowup : public NumericalError {
public:
    IntegrandBlowup(const std::string& what, std::size_t index)
        : NumericalError(what), index_(index) {}
    std::size_t integrand() const { return index_; }

private:
    std::size_t index_;
};

}  // namespace perfun
