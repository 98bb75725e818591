// errors.hpp — exception types shared by every gridqfi module

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace gridqfi {

// Bad input: non-Hermitian matrices, out-of-range indices, malformed configs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an information matrix cannot be inverted. Carries the
// (unit-norm) parameter direction that the data cannot resolve.
class SingularInformationError : public NumericalError {
public:
    SingularInformationError(const std::string& what, Eigen::VectorXd null_direction)
        : NumericalError(what), null_direction_(std::move(null_direction)) {}

    const Eigen::VectorXd& null_direction() const noexcept { return null_direction_; }

private:
    Eigen::VectorXd null_direction_;
};

} // namespace gridqfi
