#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsf {

/// Thrown when a constitutive or diagnostic function is evaluated outside its
/// domain (nonpositive density or temperature, mismatched grids, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature of the entropy tail did not converge. Usually means
/// the P_m family violates the Third-law normalization.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent problem description (e.g. static solve requested with a
/// nonconstant boundary temperature).
class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Nonlinear solver failure; carries the residual history so callers can
/// report how far the iteration got.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> trace = {})
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// A time step produced a nonpositive density or temperature. Retriable with
/// a smaller step.
class PositivityError : public std::runtime_error {
public:
    enum class Field { Density, Temperature };

    PositivityError(Field field, std::size_t cell, double value);

    Field field() const noexcept { return field_; }
    std::size_t cell() const noexcept { return cell_; }
    double value() const noexcept { return value_; }

private:
    Field field_;
    std::size_t cell_;
    double value_;
};

}  // namespace nsf
