#pragma once

#include <stdexcept>
#include <string>

namespace qclab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: geometry that violates a construction rule, malformed scenes,
// dimension mismatches.  Maps to exit code 1 in the CLI.
struct ConfigError : Error {
    using Error::Error;
};

// A computation that could not be carried out at a specific point (exact
// center hit, value outside a map's domain).  Maps to exit code 2.
struct EvaluationError : Error {
    using Error::Error;
};

// States that should be unreachable; raised so bugs surface loudly.
struct InternalError : Error {
    using Error::Error;
};

}
