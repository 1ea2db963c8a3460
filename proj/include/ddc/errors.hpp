#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddc {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative numerical routine failed to converge or overflowed.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& msg, std::size_t iterations = 0)
        : Error(msg), iterations_(iterations) {}
    std::size_t iterations() const { return iterations_; }

private:
    std::size_t iterations_;
};

/// A matrix expected to be symmetric was not, beyond tolerance.
class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// An argument violated a documented precondition.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Bound estimation received an empty sample set.
class EmptySamples : public Error {
public:
    using Error::Error;
};

/// A simulation state exceeded the overflow guard.
class UnstableRollout : public Error {
public:
    UnstableRollout(const std::string& msg, std::size_t step)
        : Error(msg), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Data failed the full-row-rank requirement.
class RankDeficient : public Error {
public:
    using Error::Error;
};

/// The equality-constrained decision space has dimension zero.
class EmptyFeasibleSpace : public Error {
public:
    using Error::Error;
};

/// A candidate decision variable violated its equality constraints.
class ConstraintViolation : public Error {
public:
    using Error::Error;
};

/// A Lyapunov block certified negative could not be safely inverted.
class SingularS : public Error {
public:
    using Error::Error;
};

/// A linear-analysis operation met a nonlinear interconnection map.
class NonlinearInterconnection : public Error {
public:
    using Error::Error;
};

} // namespace ddc
