#pragma once

#include <stdexcept>
#include <string>

namespace mamprop {

/// Failure categories. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  io = 2,
  schema = 3,
  validation = 4,
  convergence = 5,
};

const char* error_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error(ErrorKind::schema, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& message)
      : Error(ErrorKind::convergence, message) {}
};

}  // namespace mamprop
