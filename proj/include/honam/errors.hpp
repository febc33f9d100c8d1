#pragma once

#include <stdexcept>
#include <string>

namespace honam {

/// Base of every error raised by the library. The CLI maps each subclass to
/// an exit code (see tools/cli_commands.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid hyperparameter, flag or schema declaration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation invoked in the wrong lifecycle state (e.g. backward twice).
class StateError : public Error {
public:
    using Error::Error;
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input data does not match what the model or schema expects.
class ContractError : public Error {
public:
    using Error::Error;
};

class ParseError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Model file could not be read back (truncated, corrupt, wrong version).
class LoadError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Interpretation requested for an interaction order the model lacks.
class UnsupportedOrderError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace honam
