#pragma once

#include <stdexcept>
#include <string>

namespace fockforge {

// Malformed or invariant-violating input (bad spec file, non-Hermitian T, ...).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested tensor power exceeds the configured dimension budget.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition of an operation does not hold (e.g. argument is not a projection).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// T_sigma requested for an operator that does not satisfy the braid relation.
struct YbeViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two independent computations of the same object disagree beyond tolerance.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fockforge
