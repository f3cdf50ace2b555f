#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition on an argument (s outside (0,1), point inside the domain, ...).
struct DomainError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

// Integral grows under refinement instead of settling.
struct DivergenceError : NonConvergence {
    using NonConvergence::NonConvergence;
};

struct SingularSystemError : Error {
    using Error::Error;
};

}  // namespace fraclap
