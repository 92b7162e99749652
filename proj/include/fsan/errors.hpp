#pragma once

#include <stdexcept>
#include <string>

namespace fsan {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or rank disagreement between operands.
struct DimensionError : Error {
    using Error::Error;
};

// Invalid user-supplied input (empty sequence, empty dataset, ...).
struct InputError : Error {
    using Error::Error;
};

// Malformed file contents; message carries line or byte position.
struct ParseError : Error {
    using Error::Error;
};

// Invalid configuration value or combination.
struct ConfigError : Error {
    using Error::Error;
};

// API misuse (backward twice, non-scalar loss, mixed tapes, ...).
struct ContractError : Error {
    using Error::Error;
};

// Numerical failure: NaN loss, domain violation, equivalence mismatch.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace fsan
