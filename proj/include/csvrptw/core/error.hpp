#pragma once

#include <stdexcept>
#include <string>

namespace csvrptw {

// Error taxonomy. Parse/validation/config problems are thrown; solver
// outcomes that are legitimate results (infeasible LP, hitting a limit)
// travel through status enums instead and these types stay out of the
// hot paths.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Numeric breakdown that survives repair attempts (e.g. Cholesky failure
// after the PSD floor was applied).
struct NumericError : Error {
    using Error::Error;
};

// Resource exhaustion that the caller did not allow (root pricing label cap).
struct LimitError : Error {
    using Error::Error;
};

// Proven lack of a feasible cover, e.g. a fleet too small for the demand.
struct InfeasibleError : Error {
    using Error::Error;
};

}  // namespace csvrptw
