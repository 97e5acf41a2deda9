#pragma once

#include <stdexcept>
#include <string>

namespace pathwise {

/// Invalid grids, unknown catalog identifiers, mismatched inputs.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition on the data (not the configuration) failed.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Overflow/underflow that a different accumulation mode would avoid.
class NumericalRangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Raised by the enumeration oracle when the search space is over budget.
class BudgetExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace pathwise
