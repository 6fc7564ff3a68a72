#pragma once

#include <stdexcept>
#include <string>

namespace chromoseg {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments: dimension mismatches, out-of-range parameters,
// violated preconditions.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// A value that cannot be produced from the given data: zero-resultant
// mean orientation, metrics over an empty evaluation set.
class UndefinedValue : public Error {
public:
    using Error::Error;
};

// Pose sampling or composition could not satisfy its constraints
// within the retry budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

// Invalid run configuration (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

// File could not be read, parsed or written (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace chromoseg
