#pragma once

#include <stdexcept>
#include <string>

namespace swsmil {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// everything except NumericError is a usage/config/data problem (exit 2),
// NumericError signals a numeric failure during compute (exit 3).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable manifest / config / checkpoint header.
struct FormatError : Error {
    using Error::Error;
};

// Structurally valid input whose contents contradict themselves
// (e.g. manifest shape vs file byte count).
struct IntegrityError : Error {
    using Error::Error;
};

// Valid container, invalid payload (non-finite feature values, missing
// oracle labels where required).
struct DataError : Error {
    using Error::Error;
};

// Shape mismatch between operands.
struct DimensionError : Error {
    using Error::Error;
};

// Non-finite value surfaced during compute.
struct NumericError : Error {
    using Error::Error;
};

// Argument outside its documented domain (class index out of range,
// decay outside [0,1], ...).
struct DomainError : Error {
    using Error::Error;
};

// API misuse: a precondition the caller was responsible for.
struct ContractError : Error {
    using Error::Error;
};

// Bad training / generator configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem failure while reading or writing artifacts.
struct IoError : Error {
    using Error::Error;
};

}  // namespace swsmil
