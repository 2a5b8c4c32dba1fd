#pragma once

#include <stdexcept>
#include <string>

namespace lorasim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (maps to CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. The message names the file and row.
class LoadError : public Error {
public:
    using Error::Error;
};

/// A quality/outage target that no gateway range can satisfy.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace lorasim
