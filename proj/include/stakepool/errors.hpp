#pragma once

#include <stdexcept>
#include <string>

namespace stakepool {

// Bad inputs: parameter ranges, domain violations, malformed configs.
// The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The math gave up: bracket not found, iteration cap hit, no feasible root.
// The CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A structural claim (e.g. unimodality of the reward-share curve) failed its
// numerical verification. Subtype of NumericError so callers may treat it as
// a numeric failure, but it carries a different meaning: the model assumption
// does not hold for the supplied distribution.
struct DiagnosticError : NumericError {
    using NumericError::NumericError;
};

} // namespace stakepool
