#pragma once

#include <stdexcept>
#include <string>

namespace qsc {

// Malformed or out-of-domain arguments (bad sizes, |rho| > 1, unsorted ticks).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Well-formed input on which the statistic is undefined (zero variance,
// all-zero sign products, non-positive correlation in a log decomposition).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Quadrature or other numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qsc
