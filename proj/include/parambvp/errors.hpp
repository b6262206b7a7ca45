#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parambvp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed expression text. Carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation outside the defined domain (division by zero, 0 raised to a negative power).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A derivative of higher order than the declared smoothness was requested.
class SmoothnessError : public Error {
public:
    using Error::Error;
};

/// Dimension or index mismatch between interacting objects.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A point left the problem interval, or a grid/interval was invalid.
class IntervalError : public Error {
public:
    using Error::Error;
};

/// The limiting homogeneous problem has a nontrivial kernel (characteristic matrix
/// numerically singular); the solve cannot proceed.
class DegenerateProblem : public Error {
public:
    DegenerateProblem(const std::string& what, double sigma_min, double sigma_max)
        : Error(what), sigma_min_(sigma_min), sigma_max_(sigma_max) {}

    double sigma_min() const noexcept { return sigma_min_; }
    double sigma_max() const noexcept { return sigma_max_; }

private:
    double sigma_min_;
    double sigma_max_;
};

/// Time stepping failed (step-size underflow, non-finite state).
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (bad JSON, missing fields, inconsistent shapes).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace parambvp
