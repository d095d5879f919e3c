#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsav {

/// Invalid scalar parameter (alpha out of range, non-positive step, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operands live in different spaces or have incompatible sizes.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures raised while integrating in time.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The SAV relaxation denominator 1 + tau*K/E became non-positive.
class RelaxationBreakdown : public NumericalError {
public:
    RelaxationBreakdown(std::size_t step, double denominator)
        : NumericalError("relaxation breakdown at step " + std::to_string(step) +
                         ": 1 + tau*K/E = " + std::to_string(denominator)),
          step_(step), denominator_(denominator) {}

    std::size_t step() const noexcept { return step_; }
    double denominator() const noexcept { return denominator_; }

private:
    std::size_t step_;
    double denominator_;
};

/// Not enough history levels to form the six-level extrapolation.
class StartupPolicyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace fracsav
