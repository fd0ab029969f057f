#pragma once

#include <stdexcept>
#include <string>

namespace pickmetrics {

// Point outside the open disc/ball, or a non-finite coordinate.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Violated operation precondition (bad parameter range, empty input, ...).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A candidate point set failed its separation certificate.
struct SeparationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionError(what);
}

} // namespace pickmetrics
