#ifndef EQUIDEFORM_ERROR_HPP
#define EQUIDEFORM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace equideform {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied input violates a documented precondition or a hypothesis
/// of the formula being evaluated. The CLI maps this family to exit code 2.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Two values over different prime fields were combined.
class ModulusMismatch : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// The requested quantity cannot be certified at the available precision.
class PrecisionError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// Input data is self-inconsistent (e.g. ramification jumps breaking the
/// congruence m_j = m_0 mod p). Reported, never repaired.
class DataError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// No unit vector field with vanishing trace exists for this action.
class ExistenceFails : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// The trace equations of a first-order node lift have no solution.
class NotLiftable : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// A broken internal invariant: indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Brute-force cohomology did not stabilise under the precision bump.
class StabilizationFailure : public Error {
public:
    StabilizationFailure(int first, int bumped, const std::string& what)
        : Error(what + " (window result " + std::to_string(first) + ", bumped result " +
                std::to_string(bumped) + ")"),
          first_(first), bumped_(bumped) {}

    int first() const noexcept { return first_; }
    int bumped() const noexcept { return bumped_; }

private:
    int first_;
    int bumped_;
};

} // namespace equideform

#endif
