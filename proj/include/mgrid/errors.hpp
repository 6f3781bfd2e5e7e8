#pragma once

#include <stdexcept>
#include <string>

namespace mgrid {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input files that do not parse or violate their schema.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
};

// Caller broke a documented precondition (arity mismatch, missing input, ...).
struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(what) {}
};

// Numerical breakdown that we refuse to paper over.
struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace mgrid
