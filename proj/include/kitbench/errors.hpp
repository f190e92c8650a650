#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kitbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (empty RMSE, bad step size).
class DomainError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data. Carries the 1-based source line when known (0 otherwise).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ModelFileError : public Error {
 public:
  using Error::Error;
};

class ModelVersionError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

class MalformedModelError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

class ModelIoError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

}  // namespace kitbench
