#pragma once

#include <stdexcept>
#include <string>

namespace ppf {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (case files, CSV, config syntax).
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Structurally well-formed input that violates a model invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Bad configuration values (negative alpha, non-PD covariance, ...).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Numerical failure inside a solver or trainer.
class SolverError : public Error {
  public:
    using Error::Error;
};

/// Dataset construction failure (excessive rejections, size mismatch).
class DatasetError : public Error {
  public:
    using Error::Error;
};

/// Persisted file inconsistent with its metadata or schema.
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Caller broke an API precondition (dimension mismatch and the like).
class ContractError : public Error {
  public:
    using Error::Error;
};

}  // namespace ppf
