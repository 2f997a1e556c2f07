#pragma once

#include <stdexcept>
#include <string>

namespace tyc {

enum class ErrorKind {
  Validation,
  Parameter,
  NegativeState,
  BlowUp,
  GridMismatch,
  Degenerate,
  SingularDerivative,
  UnsupportedModel,
  FitDiverged,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind selects
/// the CLI exit code and the C API status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& w) : Error(ErrorKind::Parameter, w) {}
};

class NegativeStateError : public Error {
 public:
  explicit NegativeStateError(const std::string& w) : Error(ErrorKind::NegativeState, w) {}
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& w, double last_valid_time)
      : Error(ErrorKind::BlowUp, w), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class GridMismatchError : public Error {
 public:
  explicit GridMismatchError(const std::string& w) : Error(ErrorKind::GridMismatch, w) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& w) : Error(ErrorKind::Degenerate, w) {}
};

class SingularDerivativeError : public Error {
 public:
  explicit SingularDerivativeError(const std::string& w) : Error(ErrorKind::SingularDerivative, w) {}
};

class UnsupportedModelError : public Error {
 public:
  explicit UnsupportedModelError(const std::string& w) : Error(ErrorKind::UnsupportedModel, w) {}
};

class FitDivergedError : public Error {
 public:
  explicit FitDivergedError(const std::string& w) : Error(ErrorKind::FitDiverged, w) {}
};

/// Input text that could not be parsed. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& w, int line = 0)
      : Error(ErrorKind::Parse, line > 0 ? "line " + std::to_string(line) + ": " + w : w), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};

}  // namespace tyc
